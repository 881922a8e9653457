#include "qdcca/quotes.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "qdcca/error.hpp"

namespace qdcca {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

int digits(std::string_view s, std::size_t pos, std::size_t count) {
  int v = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
      throw Error(ErrorKind::kParse, "malformed timestamp '" + std::string(s) + "'");
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

[[noreturn]] void fail(ErrorKind kind, const std::string& name, std::size_t line,
                       const std::string& what) {
  throw Error(kind, name + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::int64_t parse_timestamp(std::string_view field) {
  field = trim(field);
  if (field.empty()) throw Error(ErrorKind::kParse, "empty timestamp");
  std::int64_t epoch = 0;
  if (parse_number(field, epoch)) {
    // Millisecond epochs exceed 1e11 for any date after 1973.
    if (epoch > 100'000'000'000LL || epoch < -100'000'000'000LL) epoch /= 1000;
    return epoch >= 0 ? epoch / 60 : -((-epoch + 59) / 60);
  }
  if (field.size() < 16 || field[4] != '-' || field[7] != '-' ||
      (field[10] != 'T' && field[10] != ' ') || field[13] != ':')
    throw Error(ErrorKind::kParse, "malformed timestamp '" + std::string(field) + "'");
  using namespace std::chrono;
  const year_month_day ymd{year{digits(field, 0, 4)}, month{static_cast<unsigned>(digits(field, 5, 2))},
                           day{static_cast<unsigned>(digits(field, 8, 2))}};
  if (!ymd.ok()) throw Error(ErrorKind::kParse, "invalid date '" + std::string(field) + "'");
  const int hh = digits(field, 11, 2);
  const int mm = digits(field, 14, 2);
  if (hh > 23 || mm > 59) throw Error(ErrorKind::kParse, "invalid time '" + std::string(field) + "'");
  std::string_view rest = field.substr(16);
  if (!rest.empty() && rest.front() == ':') {
    digits(rest, 1, 2);
    rest.remove_prefix(3);
    if (!rest.empty() && rest.front() == '.') {
      rest.remove_prefix(1);
      while (!rest.empty() && std::isdigit(static_cast<unsigned char>(rest.front()))) rest.remove_prefix(1);
    }
  }
  if (!(rest.empty() || rest == "Z" || rest == "+00:00"))
    throw Error(ErrorKind::kParse, "unsupported timestamp suffix in '" + std::string(field) + "'");
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 1440 + hh * 60 + mm;
}

std::string format_timestamp(std::int64_t epoch_minutes) {
  using namespace std::chrono;
  const std::int64_t day_index =
      epoch_minutes >= 0 ? epoch_minutes / 1440 : -((-epoch_minutes + 1439) / 1440);
  const std::int64_t minute = epoch_minutes - day_index * 1440;
  const year_month_day ymd{sys_days{days{day_index}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(minute / 60), static_cast<int>(minute % 60));
  return buf;
}

namespace {

/// `name` becomes the ticker of a two-column file; `source` labels errors.
std::vector<QuoteSeries> parse_csv(std::string_view text, const std::string& name,
                                   const std::string& source) {
  std::vector<QuoteSeries> out;
  std::vector<std::size_t> last_line;
  bool header_seen = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') {
      if (eol == text.size()) break;
      continue;
    }
    const auto fields = split(line);
    if (!header_seen) {
      header_seen = true;
      bool is_header = true;
      try {
        parse_timestamp(fields.front());
        is_header = false;
      } catch (const Error&) {
      }
      if (fields.size() < 2) fail(ErrorKind::kParse, source, line_no, "expected at least two columns");
      if (is_header) {
        const std::string second = lower(fields[1]);
        if (fields.size() == 2 && (second == "price" || second == "close"))
          out.push_back({name, {}, {}});
        else
          for (std::size_t c = 1; c < fields.size(); ++c) out.push_back({std::string(fields[c]), {}, {}});
        last_line.assign(out.size(), 0);
        continue;
      }
      if (fields.size() != 2)
        fail(ErrorKind::kParse, source, line_no, "multi-column file needs a header naming tickers");
      out.push_back({name, {}, {}});
      last_line.assign(1, 0);
    }
    if (fields.size() != out.size() + 1)
      fail(ErrorKind::kParse, source, line_no,
           "expected " + std::to_string(out.size() + 1) + " columns, found " +
               std::to_string(fields.size()));
    std::int64_t ts = 0;
    try {
      ts = parse_timestamp(fields.front());
    } catch (const Error& e) {
      fail(ErrorKind::kParse, source, line_no, e.what());
    }
    for (std::size_t c = 0; c < out.size(); ++c) {
      const std::string_view cell = fields[c + 1];
      if (cell.empty()) continue;
      double price = 0.0;
      if (!parse_number(cell, price))
        fail(ErrorKind::kParse, source, line_no, "cannot parse price '" + std::string(cell) + "'");
      if (!(price > 0.0) || !std::isfinite(price))
        fail(ErrorKind::kNonPositivePrice, source, line_no,
             out[c].ticker + " has nonpositive price " + std::string(cell));
      auto& series = out[c];
      if (!series.timestamps.empty() && ts <= series.timestamps.back())
        fail(ErrorKind::kUnsortedTimestamps, source, line_no,
             series.ticker + " timestamp not after line " + std::to_string(last_line[c]) +
                 (ts == series.timestamps.back() ? " (duplicate)" : ""));
      series.timestamps.push_back(ts);
      series.prices.push_back(price);
      last_line[c] = line_no;
    }
    if (eol == text.size()) break;
  }
  if (out.empty()) throw Error(ErrorKind::kParse, source + ": no data");
  return out;
}

}  // namespace

std::vector<QuoteSeries> parse_quotes(std::string_view text, const std::string& name) {
  return parse_csv(text, name, name);
}

std::vector<QuoteSeries> load_quotes(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error(ErrorKind::kIo, path.string() + ": no .csv files");
  } else {
    files.push_back(path);
  }
  std::vector<QuoteSeries> out;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    if (!in) throw Error(ErrorKind::kIo, "cannot open " + f.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    auto series = parse_csv(buf.str(), f.stem().string(), f.filename().string());
    for (auto& s : series) out.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j)
      if (out[i].ticker == out[j].ticker)
        throw Error(ErrorKind::kParse, "ticker " + out[i].ticker + " appears twice");
  return out;
}

std::vector<double> log_returns(const QuoteSeries& q) {
  if (q.size() < 2)
    throw Error(ErrorKind::kInvalidConfig, q.ticker + ": need at least two quotes for returns");
  std::vector<double> r(q.size() - 1);
  for (std::size_t t = 0; t + 1 < q.size(); ++t) r[t] = std::log(q.prices[t + 1]) - std::log(q.prices[t]);
  return r;
}

std::vector<double> normalize(std::span<const double> x) {
  if (x.empty()) throw Error(ErrorKind::kZeroVariance, "cannot normalize an empty series");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size());
  if (!(var > 0.0)) throw Error(ErrorKind::kZeroVariance, "cannot normalize a constant series");
  const double sd = std::sqrt(var);
  std::vector<double> out(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) out[t] = (x[t] - mean) / sd;
  return out;
}

QuoteSeries rebase_prices(const QuoteSeries& alt, const QuoteSeries& base) {
  QuoteSeries out;
  out.ticker = alt.ticker;
  std::size_t i = 0, j = 0;
  while (i < alt.size() && j < base.size()) {
    if (alt.timestamps[i] < base.timestamps[j]) {
      ++i;
    } else if (base.timestamps[j] < alt.timestamps[i]) {
      ++j;
    } else {
      out.timestamps.push_back(alt.timestamps[i]);
      out.prices.push_back(alt.prices[i] / base.prices[j]);
      ++i;
      ++j;
    }
  }
  if (out.prices.empty())
    throw Error(ErrorKind::kEmptyIntersection,
                alt.ticker + " and " + base.ticker + " share no timestamps");
  return out;
}

AlignedQuotes align_series(std::span<const QuoteSeries> series) {
  if (series.size() < 2) throw Error(ErrorKind::kDimensionMismatch, "alignment needs two series");
  std::vector<std::int64_t> common = series.front().timestamps;
  for (std::size_t k = 1; k < series.size(); ++k) {
    std::vector<std::int64_t> next;
    std::set_intersection(common.begin(), common.end(), series[k].timestamps.begin(),
                          series[k].timestamps.end(), std::back_inserter(next));
    common = std::move(next);
  }
  if (common.empty()) throw Error(ErrorKind::kEmptyIntersection, "series share no timestamps");

  AlignedQuotes out;
  out.timestamps = common;
  out.prices.resize(series.size() * common.size());
  for (const auto& s : series) {
    const std::size_t row = out.tickers.size();
    out.tickers.push_back(s.ticker);
    std::size_t j = 0;
    for (std::size_t t = 0; t < common.size(); ++t) {
      while (s.timestamps[j] != common[t]) ++j;
      out.prices[row * common.size() + t] = s.prices[j];
    }
    out.retention.push_back(static_cast<double>(common.size()) / static_cast<double>(s.size()));
  }
  return out;
}

AlignedQuotes align_continuous(std::span<const QuoteSeries> series) {
  if (series.size() < 2) throw Error(ErrorKind::kDimensionMismatch, "alignment needs two series");
  for (const auto& s : series)
    if (s.timestamps.empty()) throw Error(ErrorKind::kEmptyIntersection, s.ticker + " is empty");
  std::int64_t start = series.front().timestamps.front();
  std::int64_t end = series.front().timestamps.back();
  for (const auto& s : series) {
    start = std::max(start, s.timestamps.front());
    end = std::min(end, s.timestamps.back());
  }
  if (start > end) throw Error(ErrorKind::kEmptyIntersection, "series do not overlap in time");

  AlignedQuotes out;
  const auto width = static_cast<std::size_t>(end - start + 1);
  out.timestamps.resize(width);
  for (std::size_t t = 0; t < width; ++t) out.timestamps[t] = start + static_cast<std::int64_t>(t);
  out.prices.resize(series.size() * width);
  out.filled.assign(series.size() * width, 0);
  for (const auto& s : series) {
    const std::size_t row = out.tickers.size();
    out.tickers.push_back(s.ticker);
    auto it = std::upper_bound(s.timestamps.begin(), s.timestamps.end(), start);
    std::size_t j = static_cast<std::size_t>(it - s.timestamps.begin()) - 1;  // last quote <= start
    std::size_t kept = 0;
    for (std::size_t t = 0; t < width; ++t) {
      const std::int64_t now = out.timestamps[t];
      while (j + 1 < s.size() && s.timestamps[j + 1] <= now) ++j;
      out.prices[row * width + t] = s.prices[j];
      if (s.timestamps[j] == now)
        ++kept;
      else
        out.filled[row * width + t] = 1;
    }
    out.retention.push_back(static_cast<double>(kept) / static_cast<double>(s.size()));
  }
  return out;
}

ReturnMatrix build_returns(const AlignedQuotes& aligned) {
  const std::size_t n = aligned.rows();
  const std::size_t width = aligned.cols();
  if (width < 2) throw Error(ErrorKind::kInvalidConfig, "need at least two aligned quotes");
  ReturnMatrix r;
  r.tickers = aligned.tickers;
  r.timestamps.assign(aligned.timestamps.begin() + 1, aligned.timestamps.end());
  const std::size_t cols = width - 1;
  r.values.resize(n * cols);
  const bool any_filled =
      std::any_of(aligned.filled.begin(), aligned.filled.end(), [](std::uint8_t f) { return f != 0; });
  if (any_filled) r.filled.resize(n * cols);
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = aligned.prices.data() + i * width;
    for (std::size_t t = 0; t < cols; ++t) {
      r.values[i * cols + t] = std::log(p[t + 1]) - std::log(p[t]);
      if (any_filled) r.filled[i * cols + t] = aligned.filled[i * width + t + 1];
    }
  }
  return r;
}

}  // namespace qdcca
