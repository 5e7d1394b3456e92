#include "epirelax/toml.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace epirelax::toml {

double Value::number() const {
    if (!std::holds_alternative<double>(v)) fail("ConfigError", "expected a number");
    return std::get<double>(v);
}

bool Value::boolean() const {
    if (!std::holds_alternative<bool>(v)) fail("ConfigError", "expected a boolean");
    return std::get<bool>(v);
}

const std::string& Value::str() const {
    if (!std::holds_alternative<std::string>(v)) fail("ConfigError", "expected a string");
    return std::get<std::string>(v);
}

const std::vector<double>& Value::numbers() const {
    if (!std::holds_alternative<std::vector<double>>(v)) fail("ConfigError", "expected an array of numbers");
    return std::get<std::vector<double>>(v);
}

const Table& Document::single(const std::string& section) const {
    auto it = sections.find(section);
    if (it == sections.end() || it->second.empty())
        fail("ConfigError", "missing section [" + section + "]");
    return it->second.front();
}

namespace {

void strip_comment(std::string& line) {
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        if (line[i] == '#' && !in_str) {
            line.erase(i);
            return;
        }
    }
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

Value parse_scalar(const std::string& tok, int line_no) {
    std::string t = trim(tok);
    if (t.empty()) fail("ConfigError", "empty value at line " + std::to_string(line_no));
    if (t.front() == '"') {
        if (t.size() < 2 || t.back() != '"')
            fail("ConfigError", "unterminated string at line " + std::to_string(line_no));
        std::string out;
        for (std::size_t i = 1; i + 1 < t.size(); ++i) {
            if (t[i] == '\\' && i + 2 < t.size()) {
                ++i;
                out.push_back(t[i] == 'n' ? '\n' : t[i] == 't' ? '\t' : t[i]);
            } else {
                out.push_back(t[i]);
            }
        }
        return Value{out};
    }
    if (t == "true") return Value{true};
    if (t == "false") return Value{false};
    std::size_t pos = 0;
    double d = 0.0;
    try {
        d = std::stod(t, &pos);
    } catch (...) {
        fail("ConfigError", "bad value '" + t + "' at line " + std::to_string(line_no));
    }
    if (pos != t.size()) fail("ConfigError", "bad value '" + t + "' at line " + std::to_string(line_no));
    return Value{d};
}

Value parse_array(const std::string& body, int line_no) {
    std::vector<std::string> toks;
    std::string cur;
    bool in_str = false;
    for (char c : body) {
        if (c == '"') in_str = !in_str;
        if (c == ',' && !in_str) {
            toks.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!trim(cur).empty()) toks.push_back(cur);

    std::vector<double> nums;
    std::vector<std::string> strs;
    for (const std::string& t : toks) {
        Value v = parse_scalar(t, line_no);
        if (v.is_number())
            nums.push_back(v.number());
        else if (v.is_string())
            strs.push_back(v.str());
        else
            fail("ConfigError", "mixed array at line " + std::to_string(line_no));
    }
    if (!strs.empty() && !nums.empty())
        fail("ConfigError", "mixed array at line " + std::to_string(line_no));
    if (!strs.empty()) return Value{strs};
    return Value{nums};
}

}  // namespace

Document parse(const std::string& text) {
    Document doc;
    Table* current = &doc.root;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_comment(line);
        std::string t = trim(line);
        if (t.empty()) continue;

        if (t.size() >= 4 && t.substr(0, 2) == "[[") {
            if (t.substr(t.size() - 2) != "]]")
                fail("ConfigError", "bad section at line " + std::to_string(line_no));
            std::string name = trim(t.substr(2, t.size() - 4));
            doc.sections[name].push_back({});
            current = &doc.sections[name].back();
            continue;
        }
        if (t.front() == '[') {
            if (t.back() != ']') fail("ConfigError", "bad section at line " + std::to_string(line_no));
            std::string name = trim(t.substr(1, t.size() - 2));
            if (doc.sections.count(name))
                fail("ConfigError", "duplicate section [" + name + "]");
            doc.sections[name].push_back({});
            current = &doc.sections[name].back();
            continue;
        }

        std::size_t eq = std::string::npos;
        bool in_str = false;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i] == '"') in_str = !in_str;
            if (t[i] == '=' && !in_str) {
                eq = i;
                break;
            }
        }
        if (eq == std::string::npos)
            fail("ConfigError", "expected key = value at line " + std::to_string(line_no));
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        if (key.empty()) fail("ConfigError", "empty key at line " + std::to_string(line_no));

        if (!val.empty() && val.front() == '[') {
            // Multi-line arrays: read until the matching bracket.
            std::string body = val.substr(1);
            while (true) {
                std::string stripped = body;
                bool s = false;
                int depth = 1;
                std::size_t endpos = std::string::npos;
                for (std::size_t i = 0; i < stripped.size(); ++i) {
                    if (stripped[i] == '"') s = !s;
                    if (s) continue;
                    if (stripped[i] == '[') ++depth;
                    if (stripped[i] == ']' && --depth == 0) {
                        endpos = i;
                        break;
                    }
                }
                if (endpos != std::string::npos) {
                    body = stripped.substr(0, endpos);
                    break;
                }
                std::string more;
                if (!std::getline(in, more))
                    fail("ConfigError", "unterminated array near line " + std::to_string(line_no));
                ++line_no;
                strip_comment(more);
                body += " " + trim(more);
            }
            if (current->count(key)) fail("ConfigError", "duplicate key '" + key + "'");
            (*current)[key] = parse_array(body, line_no);
        } else {
            if (current->count(key)) fail("ConfigError", "duplicate key '" + key + "'");
            (*current)[key] = parse_scalar(val, line_no);
        }
    }
    return doc;
}

Document parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("ConfigError", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

void expect_keys(const Table& t, const std::vector<std::string>& allowed,
                 const std::string& where) {
    for (const auto& [k, v] : t)
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            fail("ConfigError", "unknown key '" + k + "' in " + where);
}

}  // namespace epirelax::toml
