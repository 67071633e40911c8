#include "support/sandbox.hpp"

#include <httplib.h>

#include <charconv>
#include <cmath>
#include <regex>
#include <stdexcept>

#include "syntax/language.hpp"
#include "tools/escape.hpp"

namespace trellis::testing {

struct Function {
  std::function<Value(std::vector<Value>&)> native;
  const SyntaxTree* tree = nullptr;
  NodeId node = kNoNode;  // arrow_function or function_declaration
  std::shared_ptr<Env> closure;
};

struct Env {
  std::map<std::string, Value> vars;
  std::shared_ptr<Env> parent;

  Value* lookup(const std::string& name) {
    for (Env* e = this; e; e = e->parent.get()) {
      auto it = e->vars.find(name);
      if (it != e->vars.end()) return &it->second;
    }
    return nullptr;
  }
};

namespace {

struct ReturnSignal {
  Value value;
};

[[noreturn]] void fail(const std::string& message) { throw std::runtime_error("sandbox: " + message); }

bool truthy(const Value& v) {
  switch (v.type) {
    case Value::Type::Undefined:
    case Value::Type::Null: return false;
    case Value::Type::Bool: return v.boolean;
    case Value::Type::Number: return v.number != 0 && !std::isnan(v.number);
    case Value::Type::String: return !v.string.empty();
    default: return true;
  }
}

double to_number(const Value& v) {
  switch (v.type) {
    case Value::Type::Number: return v.number;
    case Value::Type::Bool: return v.boolean ? 1 : 0;
    case Value::Type::Null: return 0;
    case Value::Type::String: {
      try {
        return v.string.empty() ? 0 : std::stod(v.string);
      } catch (...) {
        return NAN;
      }
    }
    default: return NAN;
  }
}

bool strict_equal(const Value& a, const Value& b) {
  if (a.type != b.type) return false;
  switch (a.type) {
    case Value::Type::Undefined:
    case Value::Type::Null: return true;
    case Value::Type::Bool: return a.boolean == b.boolean;
    case Value::Type::Number: return a.number == b.number;
    case Value::Type::String: return a.string == b.string;
    case Value::Type::Array: return a.array == b.array;
    case Value::Type::Object: return a.object == b.object;
    case Value::Type::Function: return a.function == b.function;
  }
  return false;
}

std::vector<NodeId> significant(const SyntaxTree& tree, NodeId id) {
  static const std::set<std::string> punct = {"(", ")", "[", "]", "{", "}", ",", ";", ":", "=>", "."};
  std::vector<NodeId> out;
  for (NodeId c : tree.named_children(id)) {
    if (!punct.count(tree.node(c).kind)) out.push_back(c);
  }
  return out;
}

Value arg(std::vector<Value>& args, std::size_t i) { return i < args.size() ? args[i] : Value::undefined(); }

}  // namespace

Value Value::null() {
  Value v;
  v.type = Type::Null;
  return v;
}
Value Value::of(bool b) {
  Value v;
  v.type = Type::Bool;
  v.boolean = b;
  return v;
}
Value Value::of(double n) {
  Value v;
  v.type = Type::Number;
  v.number = n;
  return v;
}
Value Value::of(std::string s) {
  Value v;
  v.type = Type::String;
  v.string = std::move(s);
  return v;
}
Value Value::make_array(std::vector<Value> items) {
  Value v;
  v.type = Type::Array;
  v.array = std::make_shared<std::vector<Value>>(std::move(items));
  return v;
}
Value Value::make_object() {
  Value v;
  v.type = Type::Object;
  v.object = std::make_shared<std::vector<std::pair<std::string, Value>>>();
  return v;
}
Value Value::native(std::function<Value(std::vector<Value>&)> fn) {
  Value v;
  v.type = Type::Function;
  v.function = std::make_shared<Function>();
  v.function->native = std::move(fn);
  return v;
}

Value* Value::property(const std::string& key) {
  if (type != Type::Object) return nullptr;
  for (auto& [k, v] : *object) {
    if (k == key) return &v;
  }
  return nullptr;
}

void Value::set(const std::string& key, Value v) {
  if (Value* p = property(key)) {
    *p = std::move(v);
  } else {
    object->emplace_back(key, std::move(v));
  }
}

nlohmann::json Sandbox::to_json(const Value& v) {
  switch (v.type) {
    case Value::Type::Undefined:
    case Value::Type::Function:
    case Value::Type::Null: return nullptr;
    case Value::Type::Bool: return v.boolean;
    case Value::Type::Number:
      if (std::isfinite(v.number) && std::floor(v.number) == v.number && std::fabs(v.number) < 9e15) {
        return static_cast<std::int64_t>(v.number);
      }
      return std::isfinite(v.number) ? nlohmann::json(v.number) : nlohmann::json(nullptr);
    case Value::Type::String: return v.string;
    case Value::Type::Array: {
      auto a = nlohmann::json::array();
      for (const auto& x : *v.array) a.push_back(to_json(x));
      return a;
    }
    case Value::Type::Object: {
      auto o = nlohmann::json::object();
      for (const auto& [k, x] : *v.object) {
        if (x.type != Value::Type::Undefined && x.type != Value::Type::Function) o[k] = to_json(x);
      }
      return o;
    }
  }
  return nullptr;
}

std::string Sandbox::to_string(const Value& v) {
  switch (v.type) {
    case Value::Type::Undefined: return "undefined";
    case Value::Type::Null: return "null";
    case Value::Type::Bool: return v.boolean ? "true" : "false";
    case Value::Type::Number: {
      if (std::isnan(v.number)) return "NaN";
      if (std::floor(v.number) == v.number && std::fabs(v.number) < 1e21) {
        return std::to_string(static_cast<long long>(v.number));
      }
      char buf[64];
      auto r = std::to_chars(buf, buf + sizeof buf, v.number);
      return std::string(buf, r.ptr);
    }
    case Value::Type::String: return v.string;
    case Value::Type::Array: {
      std::string s;
      for (std::size_t i = 0; i < v.array->size(); ++i) {
        if (i) s += ",";
        s += to_string((*v.array)[i]);
      }
      return s;
    }
    case Value::Type::Object: return "[object Object]";
    case Value::Type::Function: return "function";
  }
  return "";
}

Sandbox::Sandbox() : globals_(std::make_shared<Env>()) {
  Value json = Value::make_object();
  json.set("stringify", Value::native([](std::vector<Value>& a) { return Value::of(to_json(arg(a, 0)).dump()); }));
  globals_->vars["JSON"] = json;
  Value math = Value::make_object();
  math.set("max", Value::native([](std::vector<Value>& a) {
    double m = -INFINITY;
    for (auto& x : a) m = std::max(m, to_number(x));
    return Value::of(m);
  }));
  math.set("min", Value::native([](std::vector<Value>& a) {
    double m = INFINITY;
    for (auto& x : a) m = std::min(m, to_number(x));
    return Value::of(m);
  }));
  math.set("floor", Value::native([](std::vector<Value>& a) { return Value::of(std::floor(to_number(arg(a, 0)))); }));
  math.set("sqrt", Value::native([](std::vector<Value>& a) { return Value::of(std::sqrt(to_number(arg(a, 0)))); }));
  globals_->vars["Math"] = math;
  globals_->vars["fetch"] = Value::native([this](std::vector<Value>& a) {
    static const std::regex url(R"(^http://([^/:]+):(\d+)(/.*)$)");
    const std::string target = to_string(arg(a, 0));
    std::smatch m;
    if (!std::regex_match(target, m, url)) fail("unsupported url " + target);
    Value options = arg(a, 1);
    Value* body = options.property("body");
    httplib::Client client(m[1].str(), std::stoi(m[2].str()));
    auto res = client.Post(m[3].str(), body ? to_string(*body) : std::string(), "application/json");
    ++fetches_;
    statuses_.push_back(res ? res->status : -1);
    return Value::make_object();
  });
}

Value Sandbox::run(std::string_view source) {
  auto tree = std::make_shared<SyntaxTree>();
  IdAllocator ids;
  *tree = parse_document(source, "javascript", ids);
  if (tree->has_errors()) fail("parse error");
  programs_.push_back(tree);
  return exec_list(*tree, significant(*tree, tree->root()), globals_);
}

Value Sandbox::exec_list(const SyntaxTree& tree, const std::vector<NodeId>& statements,
                         const std::shared_ptr<Env>& env) {
  for (NodeId s : statements) {
    if (tree.node(s).kind != "function_declaration") continue;
    auto parts = significant(tree, s);
    auto fn = std::make_shared<Function>();
    fn->tree = &tree;
    fn->node = s;
    fn->closure = env;
    Value v;
    v.type = Value::Type::Function;
    v.function = fn;
    env->vars[std::string(tree.source(parts.at(1)))] = v;
  }
  Value last;
  for (NodeId s : statements) last = exec(tree, s, env);
  return last;
}

Value Sandbox::exec(const SyntaxTree& tree, NodeId id, const std::shared_ptr<Env>& env) {
  const std::string& kind = tree.node(id).kind;
  auto parts = significant(tree, id);
  if (kind == "expression_statement") return eval(tree, parts.at(0), env);
  if (kind == "variable_declaration") {
    for (std::size_t i = 1; i < parts.size(); ++i) {
      auto d = significant(tree, parts[i]);
      Value v = d.size() > 2 ? eval(tree, d[2], env) : Value::undefined();
      env->vars[std::string(tree.source(d.at(0)))] = v;
    }
    return {};
  }
  if (kind == "function_declaration" || kind == "empty_statement") return {};
  if (kind == "return_statement") throw ReturnSignal{parts.size() > 1 ? eval(tree, parts[1], env) : Value{}};
  if (kind == "statement_block") {
    auto inner = std::make_shared<Env>();
    inner->parent = env;
    exec_list(tree, parts, inner);
    return {};
  }
  if (kind == "if_statement") {
    // if ( cond ) stmt [else stmt]
    if (truthy(eval(tree, parts.at(1), env))) return exec(tree, parts.at(2), env);
    if (parts.size() > 4) return exec(tree, parts[4], env);
    return {};
  }
  fail("cannot execute " + kind);
}

Value Sandbox::string_literal(const SyntaxTree& tree, const std::string& raw, const std::shared_ptr<Env>& env) {
  const char q = raw.front();
  std::string_view body(raw);
  body = body.substr(1, body.size() - 2);
  if (q != '`') return Value::of(unescape_string(body, q).text);
  std::string out;
  std::size_t i = 0;
  while (i < body.size()) {
    std::size_t open = body.find("${", i);
    while (open != std::string_view::npos && open > 0 && body[open - 1] == '\\') open = body.find("${", open + 2);
    if (open == std::string_view::npos) {
      out += unescape_string(body.substr(i), q).text;
      break;
    }
    out += unescape_string(body.substr(i, open - i), q).text;
    std::size_t close = body.find('}', open);
    if (close == std::string_view::npos) fail("unterminated interpolation");
    auto sub = std::make_shared<SyntaxTree>();
    IdAllocator ids;
    *sub = parse_document("(" + std::string(body.substr(open + 2, close - open - 2)) + ");", "javascript", ids);
    programs_.push_back(sub);
    out += to_string(exec_list(*sub, significant(*sub, sub->root()), env));
    i = close + 1;
  }
  (void)tree;
  return Value::of(out);
}

Value Sandbox::member(const Value& object, const std::string& key) {
  if (object.type == Value::Type::Array) {
    auto arr = object.array;
    if (key == "length") return Value::of(static_cast<double>(arr->size()));
    auto each = [this, arr](std::vector<Value>& a, auto&& sink) {
      Value fn = arg(a, 0);
      for (std::size_t i = 0; i < arr->size(); ++i) {
        std::vector<Value> call_args{(*arr)[i], Value::of(static_cast<double>(i))};
        sink((*arr)[i], call(fn, call_args));
      }
    };
    if (key == "map") {
      return Value::native([each](std::vector<Value>& a) {
        std::vector<Value> out;
        each(a, [&](const Value&, Value r) { out.push_back(std::move(r)); });
        return Value::make_array(std::move(out));
      });
    }
    if (key == "filter") {
      return Value::native([each](std::vector<Value>& a) {
        std::vector<Value> out;
        each(a, [&](const Value& x, const Value& r) {
          if (truthy(r)) out.push_back(x);
        });
        return Value::make_array(std::move(out));
      });
    }
    if (key == "forEach") {
      return Value::native([each](std::vector<Value>& a) {
        each(a, [](const Value&, const Value&) {});
        return Value::undefined();
      });
    }
    if (key == "reduce") {
      return Value::native([this, arr](std::vector<Value>& a) {
        Value acc = a.size() > 1 ? a[1] : (arr->empty() ? Value{} : (*arr)[0]);
        for (std::size_t i = a.size() > 1 ? 0 : 1; i < arr->size(); ++i) {
          std::vector<Value> call_args{acc, (*arr)[i]};
          acc = call(a[0], call_args);
        }
        return acc;
      });
    }
    if (key == "push") {
      return Value::native([arr](std::vector<Value>& a) {
        for (auto& x : a) arr->push_back(x);
        return Value::of(static_cast<double>(arr->size()));
      });
    }
    if (key == "join") {
      return Value::native([arr](std::vector<Value>& a) {
        std::string sep = a.empty() ? "," : to_string(a[0]);
        std::string s;
        for (std::size_t i = 0; i < arr->size(); ++i) s += (i ? sep : "") + to_string((*arr)[i]);
        return Value::of(s);
      });
    }
    double idx = to_number(Value::of(key));
    if (!std::isnan(idx) && idx >= 0 && idx < static_cast<double>(arr->size())) {
      return (*arr)[static_cast<std::size_t>(idx)];
    }
    return {};
  }
  if (object.type == Value::Type::String) {
    if (key == "length") return Value::of(static_cast<double>(object.string.size()));
    if (key == "toUpperCase") {
      std::string s = object.string;
      return Value::native([s](std::vector<Value>&) {
        std::string u = s;
        for (auto& c : u) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return Value::of(u);
      });
    }
    return {};
  }
  if (object.type == Value::Type::Object) {
    Value copy = object;
    if (Value* p = copy.property(key)) return *p;
    return {};
  }
  fail("cannot read property " + key + " of " + to_string(object));
}

Value Sandbox::call(const Value& fn, std::vector<Value>& args) {
  if (fn.type != Value::Type::Function) fail("not a function");
  const Function& f = *fn.function;
  if (f.native) return f.native(args);
  const SyntaxTree& tree = *f.tree;
  auto env = std::make_shared<Env>();
  env->parent = f.closure;
  auto parts = significant(tree, f.node);
  NodeId params;
  NodeId body;
  if (tree.node(f.node).kind == "function_declaration") {
    params = parts.at(2);
    body = parts.at(3);
  } else {
    params = parts.at(0);
    body = parts.at(1);
  }
  std::vector<NodeId> names =
      tree.node(params).kind == "identifier" ? std::vector<NodeId>{params} : significant(tree, params);
  for (std::size_t i = 0; i < names.size(); ++i) env->vars[std::string(tree.source(names[i]))] = arg(args, i);
  if (tree.node(body).kind != "statement_block") return eval(tree, body, env);
  try {
    exec_list(tree, significant(tree, body), env);
  } catch (ReturnSignal& r) {
    return r.value;
  }
  return {};
}

Value Sandbox::assign(const SyntaxTree& tree, NodeId target, Value v, const std::shared_ptr<Env>& env) {
  const std::string& kind = tree.node(target).kind;
  auto parts = significant(tree, target);
  if (kind == "identifier") {
    const std::string name(tree.source(target));
    if (Value* slot = env->lookup(name)) {
      *slot = v;
    } else {
      globals_->vars[name] = v;
    }
    return v;
  }
  if (kind == "member_expression" || kind == "subscript_expression") {
    Value obj = eval(tree, parts.at(0), env);
    std::string key = kind == "member_expression" ? std::string(tree.source(parts.at(1)))
                                                   : to_string(eval(tree, parts.at(1), env));
    if (obj.type == Value::Type::Object) {
      obj.set(key, v);
    } else if (obj.type == Value::Type::Array) {
      std::size_t i = static_cast<std::size_t>(to_number(Value::of(key)));
      if (obj.array->size() <= i) obj.array->resize(i + 1);
      (*obj.array)[i] = v;
    } else {
      fail("cannot assign to property of " + to_string(obj));
    }
    return v;
  }
  fail("invalid assignment target " + kind);
}

Value Sandbox::eval(const SyntaxTree& tree, NodeId id, const std::shared_ptr<Env>& env) {
  const SyntaxNode& n = tree.node(id);
  const std::string& kind = n.kind;
  if (kind == "number") return Value::of(std::stod(n.text));
  if (kind == "string") return string_literal(tree, n.text, env);
  if (kind == "true" || kind == "false") return Value::of(kind == "true");
  if (kind == "null") return Value::null();
  if (kind == "identifier") {
    const std::string name(n.text);
    if (name == "undefined") return {};
    if (Value* v = env->lookup(name)) return *v;
    fail(name + " is not defined");
  }
  auto parts = significant(tree, id);
  if (kind == "parenthesized_expression") return eval(tree, parts.at(0), env);
  if (kind == "sequence_expression") {
    Value last;
    for (NodeId p : parts) last = eval(tree, p, env);
    return last;
  }
  if (kind == "array") {
    std::vector<Value> items;
    for (NodeId p : parts) items.push_back(eval(tree, p, env));
    return Value::make_array(std::move(items));
  }
  if (kind == "object") {
    Value o = Value::make_object();
    for (NodeId p : parts) {
      if (tree.node(p).kind == "shorthand_property_identifier") {
        const std::string name(tree.source(p));
        Value* v = env->lookup(name);
        if (!v) fail(name + " is not defined");
        o.set(name, *v);
        continue;
      }
      auto kv = significant(tree, p);
      const SyntaxNode& key = tree.node(kv.at(0));
      std::string k = key.kind == "string" ? string_literal(tree, key.text, env).string : key.text;
      o.set(k, eval(tree, kv.at(1), env));
    }
    return o;
  }
  if (kind == "arrow_function") {
    Value v;
    v.type = Value::Type::Function;
    v.function = std::make_shared<Function>();
    v.function->tree = &tree;
    v.function->node = id;
    v.function->closure = env;
    return v;
  }
  if (kind == "member_expression") return member(eval(tree, parts.at(0), env), std::string(tree.source(parts.at(1))));
  if (kind == "subscript_expression") {
    return member(eval(tree, parts.at(0), env), to_string(eval(tree, parts.at(1), env)));
  }
  if (kind == "call_expression") {
    Value fn = eval(tree, parts.at(0), env);
    std::vector<Value> args;
    const SyntaxNode& a = tree.node(parts.at(1));
    if (a.kind == "string") {
      args.push_back(string_literal(tree, a.text, env));
    } else {
      for (NodeId p : significant(tree, parts.at(1))) args.push_back(eval(tree, p, env));
    }
    return call(fn, args);
  }
  if (kind == "unary_expression") {
    const std::string op(tree.source(parts.at(0)));
    Value v = eval(tree, parts.at(1), env);
    if (op == "-") return Value::of(-to_number(v));
    if (op == "+") return Value::of(to_number(v));
    if (op == "!") return Value::of(!truthy(v));
    if (op == "typeof") {
      static const char* names[] = {"undefined", "object", "boolean", "number", "string", "object", "object",
                                    "function"};
      return Value::of(std::string(names[static_cast<int>(v.type)]));
    }
    fail("unsupported unary " + op);
  }
  if (kind == "update_expression") {
    const std::string op(tree.source(parts.at(0)));
    Value v = Value::of(to_number(eval(tree, parts.at(1), env)) + (op == "++" ? 1 : -1));
    return assign(tree, parts.at(1), v, env);
  }
  if (kind == "ternary_expression") {
    // `:` is dropped with the punctuation.
    return truthy(eval(tree, parts.at(0), env)) ? eval(tree, parts.at(2), env) : eval(tree, parts.at(3), env);
  }
  if (kind == "assignment_expression") {
    const std::string op(tree.source(parts.at(1)));
    Value rhs = eval(tree, parts.at(2), env);
    if (op != "=") {
      Value lhs = eval(tree, parts.at(0), env);
      const std::string bin = op.substr(0, op.size() - 1);
      if (bin == "+" && (lhs.type == Value::Type::String || rhs.type == Value::Type::String)) {
        rhs = Value::of(to_string(lhs) + to_string(rhs));
      } else {
        double l = to_number(lhs);
        double r = to_number(rhs);
        if (bin == "+") rhs = Value::of(l + r);
        else if (bin == "-") rhs = Value::of(l - r);
        else if (bin == "*") rhs = Value::of(l * r);
        else if (bin == "/") rhs = Value::of(l / r);
        else if (bin == "%") rhs = Value::of(std::fmod(l, r));
        else if (bin == "**") rhs = Value::of(std::pow(l, r));
      }
    }
    return assign(tree, parts.at(0), rhs, env);
  }
  if (kind == "binary_expression") {
    const std::string op(tree.source(parts.at(1)));
    Value l = eval(tree, parts.at(0), env);
    if (op == "&&") return truthy(l) ? eval(tree, parts.at(2), env) : l;
    if (op == "||") return truthy(l) ? l : eval(tree, parts.at(2), env);
    Value r = eval(tree, parts.at(2), env);
    if (op == "===") return Value::of(strict_equal(l, r));
    if (op == "!==") return Value::of(!strict_equal(l, r));
    if (op == "==") return Value::of(strict_equal(l, r) || to_number(l) == to_number(r));
    if (op == "!=") return Value::of(!(strict_equal(l, r) || to_number(l) == to_number(r)));
    if (op == "+" && (l.type == Value::Type::String || r.type == Value::Type::String)) {
      return Value::of(to_string(l) + to_string(r));
    }
    const double a = to_number(l);
    const double b = to_number(r);
    if (op == "+") return Value::of(a + b);
    if (op == "-") return Value::of(a - b);
    if (op == "*") return Value::of(a * b);
    if (op == "/") return Value::of(a / b);
    if (op == "%") return Value::of(std::fmod(a, b));
    if (op == "**") return Value::of(std::pow(a, b));
    if (op == "<") return Value::of(a < b);
    if (op == ">") return Value::of(a > b);
    if (op == "<=") return Value::of(a <= b);
    if (op == ">=") return Value::of(a >= b);
    fail("unsupported operator " + op);
  }
  fail("cannot evaluate " + kind);
}

}  // namespace trellis::testing
