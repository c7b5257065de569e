#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stlf/numio.hpp"
#include "stlf/signal.hpp"

namespace stlf {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

/// `real` | `real[lo,hi]` | `bool` | `enum{a,b,c}`
inline Kind parse_kind_decl(const std::string& text) {
  std::string s = trim(text);
  if (s == "bool") return Kind::boolean();
  if (s == "real") return Kind::real();
  if (s.rfind("real[", 0) == 0 && s.back() == ']') {
    std::string body = s.substr(5, s.size() - 6);
    auto comma = body.find(',');
    if (comma == std::string::npos) raise(Errc::parse_error, "bad real range: " + s);
    return Kind::real_range(parse_double(body.substr(0, comma)),
                            parse_double(body.substr(comma + 1)));
  }
  if (s.rfind("enum{", 0) == 0 && s.back() == '}') {
    std::string body = s.substr(5, s.size() - 6);
    std::vector<std::string> labels;
    std::string cur;
    for (char c : body) {
      if (c == ',') {
        labels.push_back(trim(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    labels.push_back(trim(cur));
    return Kind::enumeration(labels);
  }
  raise(Errc::parse_error, "unknown kind declaration: '" + s + "'");
}

inline std::string kind_decl_string(const Kind& k) {
  switch (k.tag) {
    case KindTag::boolean:
      return "bool";
    case KindTag::real:
      if (k.lo && k.hi) return "real[" + format_double(*k.lo) + "," + format_double(*k.hi) + "]";
      return "real";
    case KindTag::enumeration: {
      std::string s = "enum{";
      for (size_t i = 0; i < k.labels.size(); ++i) {
        if (i) s += ",";
        s += k.labels[i];
      }
      return s + "}";
    }
  }
  return "real";
}

}  // namespace detail

/// Parse a trace from CSV text. First column must be `time` with uniform
/// spacing; an optional second header row (empty time cell) declares
/// per-signal kinds. Without it every column is an unbounded real.
inline Trace parse_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) raise(Errc::empty_trace, "empty file");
  auto header = detail::split_csv_line(line);
  if (header.empty() || detail::trim(header[0]) != "time")
    raise(Errc::parse_error, "first column must be 'time'");
  const size_t ncols = header.size();
  if (ncols < 2) raise(Errc::parse_error, "no signal columns");

  std::vector<Kind> kinds(ncols - 1, Kind::real());
  std::vector<double> times;
  std::vector<std::vector<double>> columns(ncols - 1);

  bool first_data_line = true;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (cells.size() != ncols)
      raise(Errc::parse_error, "line " + std::to_string(lineno) + ": expected " +
                                   std::to_string(ncols) + " cells, got " +
                                   std::to_string(cells.size()));
    if (first_data_line && detail::trim(cells[0]).empty()) {
      for (size_t i = 1; i < ncols; ++i) kinds[i - 1] = detail::parse_kind_decl(cells[i]);
      first_data_line = false;
      continue;
    }
    first_data_line = false;
    times.push_back(parse_double(cells[0]));
    for (size_t i = 1; i < ncols; ++i) {
      const Kind& k = kinds[i - 1];
      const std::string cell = detail::trim(cells[i]);
      double v = 0;
      if (k.tag == KindTag::enumeration) {
        int idx = k.enum_index(cell);
        if (idx < 0)
          raise(Errc::parse_error, "line " + std::to_string(lineno) + ": '" + cell +
                                       "' is not a label of column " + header[i]);
        v = idx;
      } else {
        v = parse_double(cell);
      }
      columns[i - 1].push_back(v);
    }
  }

  if (times.empty()) raise(Errc::empty_trace, "no data rows");
  if (times.size() < 2) raise(Errc::parse_error, "need at least two rows to infer the step");
  double step = times[1] - times[0];
  if (!(step > 0)) raise(Errc::non_uniform_sampling, "time column not increasing");
  for (size_t i = 1; i + 1 < times.size(); ++i) {
    double dt = times[i + 1] - times[i];
    if (std::fabs(dt - step) > 1e-9 * step)
      raise(Errc::non_uniform_sampling,
            "row " + std::to_string(i + 2) + ": spacing " + format_double(dt) +
                " differs from step " + format_double(step));
  }

  Trace trace(step);
  for (size_t i = 1; i < ncols; ++i)
    trace.add(Signal(detail::trim(header[i]), kinds[i - 1], step, std::move(columns[i - 1])));
  return trace;
}

inline Trace load_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::parse_error, "cannot open '" + path + "'");
  return parse_trace_csv(in);
}

/// Write a trace with the kinds row, round-trip exact for the chosen
/// decimal serialization (booleans as 0/1, enums by label).
inline void write_trace_csv(std::ostream& out, const Trace& trace) {
  if (trace.empty()) raise(Errc::empty_trace, "trace has no signals");
  out << "time";
  for (const Signal& s : trace.signals()) out << ',' << s.name;
  out << '\n';
  for (const Signal& s : trace.signals()) out << ',' << detail::kind_decl_string(s.kind);
  out << '\n';
  for (size_t i = 0; i < trace.length(); ++i) {
    out << format_double(static_cast<double>(i) * trace.step());
    for (const Signal& s : trace.signals()) {
      out << ',';
      switch (s.kind.tag) {
        case KindTag::boolean:
          out << (s.samples[i] != 0.0 ? '1' : '0');
          break;
        case KindTag::enumeration:
          out << s.kind.labels[static_cast<size_t>(s.samples[i])];
          break;
        case KindTag::real:
          out << format_double(s.samples[i]);
          break;
      }
    }
    out << '\n';
  }
}

inline void save_trace_csv(const std::string& path, const Trace& trace) {
  std::ofstream out(path);
  if (!out) raise(Errc::parse_error, "cannot write '" + path + "'");
  write_trace_csv(out, trace);
}

}  // namespace stlf
