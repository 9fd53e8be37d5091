// Copyright 2026 The mcalloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace mcalloc::io {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

double parse_double(const std::string& s, const std::string& path, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(path + ":" + std::to_string(line) + ": cannot parse number '" + s + "'");
  }
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  Table t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r" || line.front() == '#') continue;
    if (t.header.empty())
      t.header = split(line);
    else
      t.rows.push_back(split(line));
  }
  if (t.header.empty()) throw IoError(path + ": missing header");
  return t;
}

std::size_t column(const Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i)
    if (t.header[i] == name) return i;
  return t.header.size();
}

void check_indices(const Table& t, const std::string& path) {
  const std::size_t idx = column(t, "index");
  if (idx == t.header.size()) throw IoError(path + ": missing 'index' column");
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.rows[r].size() != t.header.size()) throw IoError(path + ":" + std::to_string(r + 2) + ": wrong field count");
    if (t.rows[r][idx] != std::to_string(r + 1))
      throw IoError(path + ":" + std::to_string(r + 2) + ": expected index " + std::to_string(r + 1));
  }
}

class Writer {
 public:
  explicit Writer(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot write " + path);
  }
  std::ostream& stream() { return out_; }
  void close() {
    out_.flush();
    if (!out_) throw IoError("write failed for " + path_);
  }

 private:
  std::string path_;
  std::ofstream out_;
};

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> read_pvalues_csv(const std::string& path) {
  const Table t = read_table(path);
  check_indices(t, path);
  const std::size_t col = column(t, "p_value");
  if (col == t.header.size()) throw IoError(path + ": missing 'p_value' column");
  std::vector<double> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) out.push_back(parse_double(t.rows[r][col], path, r + 2));
  return out;
}

void write_pvalues_csv(const std::string& path, const PValueSet& p) {
  Writer w(path);
  w.stream() << "index,p_value\n";
  for (std::size_t i = 0; i < p.size(); ++i) w.stream() << i + 1 << ',' << format_double(p[i]) << '\n';
  w.close();
}

Allocation read_allocation_csv(const std::string& path) {
  const Table t = read_table(path);
  check_indices(t, path);
  if (const std::size_t col = column(t, "k_discrete"); col != t.header.size()) {
    std::vector<std::int64_t> k;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const double v = parse_double(t.rows[r][col], path, r + 2);
      if (v != std::floor(v)) throw IoError(path + ":" + std::to_string(r + 2) + ": k_discrete is not an integer");
      k.push_back(static_cast<std::int64_t>(v));
    }
    return Allocation::discrete(std::move(k));
  }
  if (const std::size_t col = column(t, "k_continuous"); col != t.header.size()) {
    std::vector<double> k;
    for (std::size_t r = 0; r < t.rows.size(); ++r) k.push_back(parse_double(t.rows[r][col], path, r + 2));
    return Allocation::continuous(std::move(k));
  }
  throw IoError(path + ": no k_discrete or k_continuous column");
}

void write_kt_csv(const std::string& path, const PValueSet& p, const KtSolution& sol) {
  Writer w(path);
  w.stream() << "index,p_value,k_continuous\n";
  for (std::size_t i = 0; i < p.size(); ++i)
    w.stream() << i + 1 << ',' << format_double(p[i]) << ',' << format_double(sol.allocation[i]) << '\n';
  w.close();
}

void write_discrete_csv(const std::string& path, const PValueSet& p, const Allocation& k) {
  const auto counts = k.counts();
  Writer w(path);
  w.stream() << "index,p_value,k_discrete\n";
  for (std::size_t i = 0; i < p.size(); ++i) w.stream() << i + 1 << ',' << format_double(p[i]) << ',' << counts[i] << '\n';
  w.close();
}

void write_thompson_csv(const std::string& path, const ThompsonResult& res) {
  Writer w(path);
  w.stream() << "index,k_discrete,s,p_hat_plus_one\n";
  for (std::size_t i = 0; i < res.state.size(); ++i) {
    const double p_hat =
        static_cast<double>(res.state.s[i] + 1) / static_cast<double>(res.state.k[i] + 1);
    w.stream() << i + 1 << ',' << res.state.k[i] << ',' << res.state.s[i] << ',' << format_double(p_hat) << '\n';
  }
  w.close();
}

void write_convergence_csv(const std::string& path, const std::vector<ConvergencePoint>& points) {
  Writer w(path);
  w.stream() << "K,q05,q50,q95\n";
  for (const auto& pt : points)
    w.stream() << pt.K << ',' << format_double(pt.q05) << ',' << format_double(pt.q50) << ','
               << format_double(pt.q95) << '\n';
  w.close();
}

void write_profile_csv(const std::string& path, const std::vector<ProfilePoint>& points) {
  Writer w(path);
  w.stream() << "k,g_i\n";
  for (const auto& pt : points) w.stream() << pt.k << ',' << format_double(pt.g) << '\n';
  w.close();
}

void write_text(const std::string& path, const std::string& text) {
  Writer w(path);
  w.stream() << text;
  w.close();
}

}  // namespace mcalloc::io
