#include "covidprep/frame.hpp"

#include <cstring>
#include <stdexcept>

namespace covidprep {

SeriesFrame::SeriesFrame(std::vector<Date> dates, std::vector<Column> columns, FrameMeta meta)
    : dates_(std::move(dates)), columns_(std::move(columns)), meta_(std::move(meta)) {
  validate();
}

std::vector<std::string> SeriesFrame::column_names() const {
  std::vector<std::string> names;
  names.reserve(columns_.size());
  for (const auto& c : columns_) names.push_back(c.name);
  return names;
}

bool SeriesFrame::has(std::string_view name) const noexcept {
  for (const auto& c : columns_)
    if (c.name == name) return true;
  return false;
}

const Series& SeriesFrame::at(std::string_view name) const {
  for (const auto& c : columns_)
    if (c.name == name) return c.values;
  throw Error(ErrorCode::MissingInput, "no column '" + std::string(name) + "'");
}

Series& SeriesFrame::at(std::string_view name) {
  for (auto& c : columns_)
    if (c.name == name) return c.values;
  throw Error(ErrorCode::MissingInput, "no column '" + std::string(name) + "'");
}

void SeriesFrame::set(std::string_view name, Series values) {
  if (values.size() != dates_.size()) throw std::logic_error("column length differs from date index");
  for (auto& c : columns_) {
    if (c.name == name) {
      c.values = std::move(values);
      return;
    }
  }
  columns_.push_back(Column{std::string(name), std::move(values)});
}

void SeriesFrame::validate() const {
  for (std::size_t i = 1; i < dates_.size(); ++i) {
    if (dates_[i] - dates_[i - 1] != std::chrono::days{1}) throw std::logic_error("frame dates are not contiguous");
  }
  for (const auto& c : columns_) {
    if (c.values.size() != dates_.size()) throw std::logic_error("column '" + c.name + "' has wrong length");
  }
  if (meta_.population && !(*meta_.population > 0.0)) throw std::logic_error("population must be positive");
}

bool operator==(const SeriesFrame& a, const SeriesFrame& b) {
  if (a.dates_ != b.dates_ || !(a.meta_ == b.meta_) || a.columns_.size() != b.columns_.size()) return false;
  for (std::size_t k = 0; k < a.columns_.size(); ++k) {
    const auto& ca = a.columns_[k];
    const auto& cb = b.columns_[k];
    if (ca.name != cb.name || ca.values.size() != cb.values.size()) return false;
    for (std::size_t i = 0; i < ca.values.size(); ++i) {
      double x = ca.values[i];
      double y = cb.values[i];
      if (is_missing(x) || is_missing(y)) {
        if (is_missing(x) != is_missing(y)) return false;
        continue;
      }
      if (std::memcmp(&x, &y, sizeof x) != 0) return false;
    }
  }
  return true;
}

}  // namespace covidprep
