#include "covidprep/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>
#include <set>

namespace covidprep::ingest {

std::string_view to_string(ColumnClass c) noexcept {
  switch (c) {
    case ColumnClass::Empty: return "Empty";
    case ColumnClass::Constant: return "Constant";
    case ColumnClass::Variable: return "Variable";
  }
  return "";
}

std::string_view to_string(ColumnGroup g) noexcept {
  switch (g) {
    case ColumnGroup::NewColumns: return "NewColumns";
    case ColumnGroup::Independent: return "Independent";
    case ColumnGroup::Remaining: return "Remaining";
  }
  return "";
}

namespace {

bool is_categorical(std::string_view name) {
  return std::find(std::begin(kCategoricalColumns), std::end(kCategoricalColumns), name) !=
         std::end(kCategoricalColumns);
}

// RFC-4180 record splitter over a whole buffer.
class CsvReader {
 public:
  explicit CsvReader(std::string_view text) : text_(text) {}

  bool next(std::vector<std::string>& fields) {
    fields.clear();
    if (pos_ >= text_.size()) return false;
    std::string field;
    bool quoted = false;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (quoted) {
        if (c == '"') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
            field.push_back('"');
            pos_ += 2;
            continue;
          }
          quoted = false;
          ++pos_;
          continue;
        }
        field.push_back(c);
        ++pos_;
        continue;
      }
      if (c == '"') {
        quoted = true;
        ++pos_;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
        ++pos_;
      } else if (c == '\r' || c == '\n') {
        if (c == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n') ++pos_;
        ++pos_;
        break;
      } else {
        field.push_back(c);
        ++pos_;
      }
    }
    fields.push_back(std::move(field));
    return true;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

struct RawRecord {
  Date date;
  std::vector<double> values;
};

struct LocationAccumulator {
  FrameMeta meta;
  std::vector<RawRecord> records;
};

}  // namespace

double parse_number(std::string_view cell) noexcept {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
  if (cell.empty()) return kMissing;
  std::string_view body = cell;
  if (body.front() == '+') body.remove_prefix(1);
  std::string_view digits = body;
  if (!digits.empty() && digits.front() == '-') digits.remove_prefix(1);
  // from_chars would also take "inf"/"nan"; only plain decimal forms count.
  if (digits.empty() || !(std::isdigit(static_cast<unsigned char>(digits.front())) || digits.front() == '.')) {
    return kMissing;
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v, std::chars_format::general);
  if (ec != std::errc{} || ptr != body.data() + body.size()) return kMissing;
  return v;
}

ParsedFile parse_owid_csv_text(std::string_view text, std::string_view digest) {
  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF && static_cast<unsigned char>(text[1]) == 0xBB &&
      static_cast<unsigned char>(text[2]) == 0xBF) {
    text.remove_prefix(3);
  }
  CsvReader reader(text);
  std::vector<std::string> header;
  if (!reader.next(header) || (header.size() == 1 && header[0].empty())) {
    throw Error(ErrorCode::EmptyFile, "no header row");
  }

  auto find = [&](std::string_view name) -> std::ptrdiff_t {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : it - header.begin();
  };
  for (std::string_view required : {"iso_code", "location", "date", "population"}) {
    if (find(required) < 0) throw Error(ErrorCode::MissingHeader, "required column '" + std::string(required) + "'");
  }
  const auto iso_idx = static_cast<std::size_t>(find("iso_code"));
  const auto loc_idx = static_cast<std::size_t>(find("location"));
  const auto date_idx = static_cast<std::size_t>(find("date"));
  const std::ptrdiff_t continent_idx = find("continent");
  const std::ptrdiff_t units_idx = find("tests_units");

  std::vector<std::size_t> numeric_idx;
  std::vector<std::string> numeric_names;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i == date_idx || is_categorical(header[i])) continue;
    numeric_idx.push_back(i);
    numeric_names.push_back(header[i]);
  }

  std::map<std::string, LocationAccumulator> acc;
  std::vector<std::string> fields;
  std::size_t line = 1;
  std::size_t data_rows = 0;
  while (reader.next(fields)) {
    ++line;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    fields.resize(header.size());
    ++data_rows;
    Date d;
    try {
      d = parse_date(fields[date_idx]);
    } catch (const Error&) {
      throw Error(ErrorCode::MalformedDate, "line " + std::to_string(line) + ": '" + fields[date_idx] + "'");
    }
    auto& loc = acc[fields[iso_idx]];
    if (loc.records.empty()) {
      loc.meta.iso_code = fields[iso_idx];
      loc.meta.location = fields[loc_idx];
    }
    if (continent_idx >= 0 && loc.meta.continent.empty()) loc.meta.continent = fields[continent_idx];
    if (units_idx >= 0 && loc.meta.tests_units.empty()) loc.meta.tests_units = fields[units_idx];
    RawRecord rec{d, {}};
    rec.values.reserve(numeric_idx.size());
    for (std::size_t i : numeric_idx) rec.values.push_back(parse_number(fields[i]));
    loc.records.push_back(std::move(rec));
  }
  if (data_rows == 0) throw Error(ErrorCode::EmptyFile, "header without data rows");

  const auto pop_pos = static_cast<std::size_t>(
      std::find(numeric_names.begin(), numeric_names.end(), "population") - numeric_names.begin());

  ParsedFile out;
  for (auto& [iso, loc] : acc) {
    std::stable_sort(loc.records.begin(), loc.records.end(),
                     [](const RawRecord& a, const RawRecord& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < loc.records.size(); ++i) {
      if (loc.records[i].date == loc.records[i - 1].date) {
        throw Error(ErrorCode::DuplicateDate, iso + " " + format_date(loc.records[i].date));
      }
    }
    for (const auto& rec : loc.records) {
      if (!is_missing(rec.values[pop_pos])) {
        loc.meta.population = rec.values[pop_pos];
        break;
      }
    }
    if (loc.meta.population && !(*loc.meta.population > 0.0)) {
      throw Error(ErrorCode::NonpositivePopulation, iso);
    }
    loc.meta.source_digest = std::string(digest);

    const Date first = loc.records.front().date;
    const Date last = loc.records.back().date;
    const auto n = static_cast<std::size_t>((last - first).count() + 1);
    std::vector<Date> dates(n);
    for (std::size_t i = 0; i < n; ++i) dates[i] = first + std::chrono::days{static_cast<long>(i)};
    std::vector<Column> columns;
    columns.reserve(numeric_names.size());
    for (const auto& name : numeric_names) columns.push_back(Column{name, Series(n, kMissing)});
    std::vector<Date> record_dates;
    record_dates.reserve(loc.records.size());
    for (const auto& rec : loc.records) {
      const auto row = static_cast<std::size_t>((rec.date - first).count());
      for (std::size_t k = 0; k < columns.size(); ++k) columns[k].values[row] = rec.values[k];
      record_dates.push_back(rec.date);
    }
    out.record_dates.emplace(iso, std::move(record_dates));
    out.frames.emplace(iso, SeriesFrame(std::move(dates), std::move(columns), loc.meta));
  }
  return out;
}

ParsedFile parse_owid_csv(const std::string& path) {
  std::string text = read_file(path);
  if (text.empty()) throw Error(ErrorCode::EmptyFile, path);
  return parse_owid_csv_text(text, fnv1a_hex(text));
}

SeriesFrame filter_location(const ParsedFile& parsed, std::string_view iso_code, Date start, Date end) {
  auto it = parsed.frames.find(std::string(iso_code));
  if (it == parsed.frames.end()) throw Error(ErrorCode::UnknownLocation, std::string(iso_code));
  if (start > end) throw Error(ErrorCode::EmptyRange, "start after end");
  const SeriesFrame& src = it->second;
  const auto& rec = parsed.record_dates.at(it->first);
  std::optional<Date> first, last;
  for (Date d : rec) {
    if (d < start || d > end) continue;
    if (!first || d < *first) first = d;
    if (!last || d > *last) last = d;
  }
  if (!first) {
    throw Error(ErrorCode::EmptyRange,
                std::string(iso_code) + " has no rows in " + format_date(start) + ".." + format_date(end));
  }

  // The calendar span of the records inside the range.
  const auto n = static_cast<std::size_t>((*last - *first).count() + 1);
  std::vector<Date> dates(n);
  for (std::size_t i = 0; i < n; ++i) dates[i] = *first + std::chrono::days{static_cast<long>(i)};
  const Date src_first = src.dates().front();
  const Date src_last = src.dates().back();
  std::vector<Column> columns;
  for (const auto& col : src.columns()) {
    Series values(n, kMissing);
    for (std::size_t i = 0; i < n; ++i) {
      if (dates[i] < src_first || dates[i] > src_last) continue;
      values[i] = col.values[static_cast<std::size_t>((dates[i] - src_first).count())];
    }
    columns.push_back(Column{col.name, std::move(values)});
  }
  return SeriesFrame(std::move(dates), std::move(columns), src.meta());
}

std::map<std::string, ColumnClass> classify_columns(const SeriesFrame& frame) {
  std::map<std::string, ColumnClass> out;
  for (const auto& col : frame.columns()) {
    std::size_t present = 0;
    bool constant = true;
    double first = 0.0;
    for (double v : col.values) {
      if (is_missing(v)) continue;
      if (present == 0) first = v;
      else if (v != first) constant = false;
      ++present;
    }
    out[col.name] = present == 0 ? ColumnClass::Empty : (constant ? ColumnClass::Constant : ColumnClass::Variable);
  }
  return out;
}

std::map<std::string, ColumnGroup> group_columns(const SeriesFrame& frame) {
  auto in = [](auto& list, const std::string& name) {
    return std::find(std::begin(list), std::end(list), name) != std::end(list);
  };
  std::map<std::string, ColumnGroup> out;
  for (const auto& col : frame.columns()) {
    if (in(kNewColumns, col.name)) out[col.name] = ColumnGroup::NewColumns;
    else if (in(kIndependentColumns, col.name)) out[col.name] = ColumnGroup::Independent;
    else out[col.name] = ColumnGroup::Remaining;
  }
  return out;
}

std::string write_csv(const SeriesFrame& frame) {
  const auto& meta = frame.meta();
  const bool has_population = frame.has("population");
  std::string out = "iso_code,continent,location,tests_units,date";
  for (const auto& col : frame.columns()) {
    out += ',';
    out += csv_escape(col.name);
  }
  if (!has_population) out += ",population";
  out += '\n';
  const std::string prefix = csv_escape(meta.iso_code) + ',' + csv_escape(meta.continent) + ',' +
                             csv_escape(meta.location) + ',' + csv_escape(meta.tests_units) + ',';
  const std::string pop = meta.population ? format_double(*meta.population) : std::string();
  for (std::size_t i = 0; i < frame.rows(); ++i) {
    out += prefix;
    out += format_date(frame.dates()[i]);
    for (const auto& col : frame.columns()) {
      out += ',';
      if (!is_missing(col.values[i])) out += format_double(col.values[i]);
    }
    if (!has_population) {
      out += ',';
      out += pop;
    }
    out += '\n';
  }
  return out;
}

}  // namespace covidprep::ingest
