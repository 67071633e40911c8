// Inventory helpers used by the diff and fragment tests.
var items = [1, 2, 3, 4, 5];
let total = 0;
const names = ["apple", "pear", 'plum'];

function square(n) {
  return n * n;
}

function sum(list) {
  let acc = 0;
  list.forEach(x => { acc += x; });
  return acc;
}

function describe(item, index) {
  if (index > 2) {
    return "item " + item;
  } else {
    return `small ${item}`;
  }
}

var cubes = items.map(n => n ** 3);
var squares = items.map(square);
total = sum(cubes) + sum(squares);

const config = {
  width: 640,
  height: 480,
  title: "demo",
  scale: 1.5,
};

function area(c) {
  return c.width * c.height * c.scale;
}

var label = typeof total === "number" ? "ok" : "bad";
var flags = [true, false, null];
var nested = [[1, 2], [3, 4], []];

function pick(obj, key) {
  return obj[key];
}

pick(config, "title");
describe(names[0], 1);
describe(names[2], 3);
total += area(config) - -1;
label;
