// Copyright 2026 the feelsim authors
// SPDX-License-Identifier: Apache-2.0

#include "feelsim/trace.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace feelsim {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

void append_opt(std::string& out, const std::optional<double>& v) {
  out += ',';
  if (v) {
    if (!std::isfinite(*v))
      throw std::invalid_argument("trace: non-finite value in row");
    out += format_double(*v);
  } else {
    out += '-';
  }
}

}  // namespace

std::string format_trace_row(const TraceRow& row) {
  if (!std::isfinite(row.train_loss))
    throw std::invalid_argument("trace: non-finite train loss");
  std::string out = std::to_string(row.t);
  out += ',';
  out += format_double(row.train_loss);
  append_opt(out, row.test_metric);
  append_opt(out, row.capacity_bits);
  out += ',';
  out += row.q ? std::to_string(*row.q) : std::string("-");
  append_opt(out, row.bit_cost);
  append_opt(out, row.mean_est_mse);
  append_opt(out, row.active_fraction);
  append_opt(out, row.gamma_bar);
  return out;
}

void write_text_atomic(const std::string& text,
                       const std::filesystem::path& path) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_trace_csv(const std::vector<TraceRow>& rows,
                     const std::filesystem::path& path) {
  std::string text(kTraceHeader);
  text += '\n';
  for (const TraceRow& row : rows) {
    text += format_trace_row(row);
    text += '\n';
  }
  write_text_atomic(text, path);
}

}  // namespace feelsim
