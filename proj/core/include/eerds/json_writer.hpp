#pragma once

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace eerds {

/// Minimal JSON emitter with insertion order preserved and numbers printed
/// at 17 significant digits so identical runs serialize identically.
class JsonWriter {
 public:
  JsonWriter& begin_object() {
    separate();
    out_ << '{';
    stack_.push_back(true);
    return *this;
  }
  JsonWriter& end_object() {
    out_ << '}';
    stack_.pop_back();
    return *this;
  }
  JsonWriter& begin_array() {
    separate();
    out_ << '[';
    stack_.push_back(true);
    return *this;
  }
  JsonWriter& end_array() {
    out_ << ']';
    stack_.pop_back();
    return *this;
  }
  JsonWriter& key(const std::string& k) {
    separate();
    write_string(k);
    out_ << ':';
    pending_value_ = true;
    return *this;
  }
  JsonWriter& value(double v) {
    separate();
    if (!std::isfinite(v)) {
      out_ << "null";
      return *this;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out_ << buf;
    return *this;
  }
  JsonWriter& value(int v) {
    separate();
    out_ << v;
    return *this;
  }
  JsonWriter& value(long v) {
    separate();
    out_ << v;
    return *this;
  }
  JsonWriter& value(bool v) {
    separate();
    out_ << (v ? "true" : "false");
    return *this;
  }
  JsonWriter& value(const std::string& v) {
    separate();
    write_string(v);
    return *this;
  }
  JsonWriter& value(const char* v) { return value(std::string(v)); }
  JsonWriter& null() {
    separate();
    out_ << "null";
    return *this;
  }

  template <class T>
  JsonWriter& kv(const std::string& k, const T& v) {
    key(k);
    return value(v);
  }
  JsonWriter& kv_null(const std::string& k) {
    key(k);
    return null();
  }

  std::string str() const { return out_.str(); }

 private:
  void separate() {
    if (pending_value_) {
      pending_value_ = false;
      return;
    }
    if (!stack_.empty()) {
      if (!stack_.back()) out_ << ',';
      stack_.back() = false;
    }
  }
  void write_string(const std::string& s) {
    out_ << '"';
    for (char ch : s) {
      switch (ch) {
        case '"': out_ << "\\\""; break;
        case '\\': out_ << "\\\\"; break;
        case '\n': out_ << "\\n"; break;
        case '\t': out_ << "\\t"; break;
        default: out_ << ch;
      }
    }
    out_ << '"';
  }

  std::ostringstream out_;
  std::vector<bool> stack_;
  bool pending_value_ = false;
};

}  // namespace eerds
