#include "covidprep/common.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace covidprep {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingHeader: return "MissingHeader";
    case ErrorCode::MalformedDate: return "MalformedDate";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::DuplicateDate: return "DuplicateDate";
    case ErrorCode::UnknownLocation: return "UnknownLocation";
    case ErrorCode::EmptyRange: return "EmptyRange";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::NonpositivePopulation: return "NonpositivePopulation";
    case ErrorCode::CyclicGraph: return "CyclicGraph";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::MissingInput: return "MissingInput";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::MissingRun: return "MissingRun";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Date parse_date(std::string_view text) {
  auto fail = [&] { return Error(ErrorCode::MalformedDate, "cannot parse date '" + std::string(text) + "'"); };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw fail();
  auto field = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, v);
    if (ec != std::errc{} || ptr != text.data() + pos + len) throw fail();
    return v;
  };
  using namespace std::chrono;
  year_month_day ymd{year{field(0, 4)}, month{static_cast<unsigned>(field(5, 2))},
                     day{static_cast<unsigned>(field(8, 2))}};
  if (!ymd.ok()) throw fail();
  return sys_days{ymd};
}

std::string format_date(Date d) {
  std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

Rng Rng::fork(std::string_view label) const {
  std::uint64_t h = 14695981039346656037ULL ^ (seed_ * 0x9E3779B97F4A7C15ULL);
  for (unsigned char c : label) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return Rng(h);
}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t Rng::below(std::size_t bound) {
  // Lemire-style rejection keeps the mapping unbiased.
  const std::uint64_t range = bound;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % range);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  has_spare_ = true;
  return u * m;
}

void write_file_atomic(const std::string& path, std::string_view contents) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace covidprep
