# Small numeric helpers exercised by the property tests.
def square(n):
    return n * n


def total(values):
    acc = 0
    acc += values[0]
    return acc + sum(values)


def describe(item, index):
    if index > 2:
        return "item " + str(item)
    elif index == 0:
        return None
    else:
        return 'small'


items = [1, 2, 3, 4, 5]
pair = (1, 2)
single = (3,)
table = {"a": 1, "b": 2}
result = total(items) * 4
flag = not result and True or False
cube = square(3) ** 3 // 2
print(describe(items[0], 1))
name = table["a"] if flag else table["b"]
