#include "state_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace qdecon::cli {

namespace {

struct Token {
  std::string_view text;
  int column;  // 1-based
};

struct Line {
  int number;
  std::vector<Token> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++number;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t' || raw[i] == '\r')) ++i;
      std::size_t j = i;
      while (j < raw.size() && raw[j] != ' ' && raw[j] != '\t' && raw[j] != '\r') ++j;
      if (j > i) line.tokens.push_back({raw.substr(i, j - i), static_cast<int>(i) + 1});
      i = j;
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
    if (end == text.size()) break;
    pos = end + 1;
  }
  return lines;
}

double parse_double(std::string_view s, int line, int column) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(line, column, "invalid number '" + std::string(s) + "'");
  }
  return v;
}

int parse_int(std::string_view s, int line, int column) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(line, column, "invalid integer '" + std::string(s) + "'");
  }
  return v;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

ParseError::ParseError(int line, int column, const std::string& what)
    : Error("line " + std::to_string(line) +
            (column > 0 ? ", column " + std::to_string(column) : std::string()) + ": " + what),
      line_(line),
      column_(column) {}

MultipartiteState parse_state(std::string_view text, const Tolerances& tol) {
  const std::vector<Line> lines = tokenize(text);
  // Missing content is reported at the line just past the end of the text.
  const int end_line = static_cast<int>(std::count(text.begin(), text.end(), '\n')) + 1;
  auto need = [&](std::size_t k, const char* what) -> const Line& {
    if (k >= lines.size()) throw ParseError(end_line, 0, std::string("missing ") + what);
    return lines[k];
  };

  const Line& header = need(0, "header");
  if (header.tokens.size() != 2 || header.tokens[0].text != "QSTATE") {
    throw ParseError(header.number, 1, "expected 'QSTATE 1'");
  }
  if (header.tokens[1].text != "1") {
    throw ParseError(header.number, header.tokens[1].column,
                     "unsupported format version '" + std::string(header.tokens[1].text) + "'");
  }

  const Line& lab = need(1, "labels line");
  if (lab.tokens.empty() || lab.tokens[0].text != "labels") {
    throw ParseError(lab.number, 1, "expected 'labels <name>...'");
  }
  Labels labels;
  for (std::size_t i = 1; i < lab.tokens.size(); ++i) {
    const auto& t = lab.tokens[i];
    if (t.text.find(',') != std::string_view::npos) {
      throw ParseError(lab.number, t.column, "label may not contain ','");
    }
    labels.emplace_back(t.text);
  }
  if (labels.empty()) throw ParseError(lab.number, 0, "no labels");

  const Line& dl = need(2, "dims line");
  if (dl.tokens.empty() || dl.tokens[0].text != "dims") {
    throw ParseError(dl.number, 1, "expected 'dims <int>...'");
  }
  if (dl.tokens.size() - 1 != labels.size()) {
    throw ParseError(dl.number, 0,
                     "dims line has " + std::to_string(dl.tokens.size() - 1) +
                         " entries for " + std::to_string(labels.size()) + " labels");
  }
  std::vector<int> dims;
  long total = 1;
  for (std::size_t i = 1; i < dl.tokens.size(); ++i) {
    const int d = parse_int(dl.tokens[i].text, dl.number, dl.tokens[i].column);
    if (d < 1) throw ParseError(dl.number, dl.tokens[i].column, "dimension must be >= 1");
    dims.push_back(d);
    total *= d;
    if (total > 4096) throw ParseError(dl.number, dl.tokens[i].column, "total dimension too large");
  }

  SystemLayout layout = [&] {
    try {
      return SystemLayout(labels, dims);
    } catch (const Error& e) {
      throw ParseError(lab.number, 0, e.what());
    }
  }();

  Matrix m(total, total);
  for (long r = 0; r < total; ++r) {
    const Line& row = need(3 + static_cast<std::size_t>(r), "matrix row");
    if (static_cast<long>(row.tokens.size()) != total) {
      throw ParseError(row.number, 0,
                       "row has " + std::to_string(row.tokens.size()) + " entries, expected " +
                           std::to_string(total));
    }
    for (long c = 0; c < total; ++c) {
      const Token& t = row.tokens[c];
      const auto comma = t.text.find(',');
      if (comma == std::string_view::npos) {
        throw ParseError(row.number, t.column, "entry must be 're,im'");
      }
      const double re = parse_double(t.text.substr(0, comma), row.number, t.column);
      const double im = parse_double(t.text.substr(comma + 1), row.number,
                                     t.column + static_cast<int>(comma) + 1);
      m(r, c) = Complex(re, im);
    }
  }
  if (lines.size() > 3 + static_cast<std::size_t>(total)) {
    throw ParseError(lines[3 + total].number, 1, "unexpected content after the matrix");
  }

  try {
    (void)MultipartiteState(layout, m, tol);
  } catch (const Error& e) {
    throw ParseError(lines[3].number, 0, std::string("invalid state: ") + e.what());
  }
  return MultipartiteState::unchecked(std::move(layout), std::move(m));
}

std::string write_state(const MultipartiteState& s) {
  std::string out = "QSTATE 1\nlabels";
  for (const auto& l : s.labels()) out += " " + l;
  out += "\ndims";
  for (int d : s.layout().dims()) out += " " + std::to_string(d);
  out += "\n";
  const Matrix& m = s.matrix();
  for (long r = 0; r < m.rows(); ++r) {
    for (long c = 0; c < m.cols(); ++c) {
      if (c) out += ' ';
      out += format_double(m(r, c).real()) + "," + format_double(m(r, c).imag());
    }
    out += '\n';
  }
  return out;
}

MultipartiteState read_state_file(const std::string& path, const Tolerances& tol) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_state(ss.str(), tol);
}

void write_state_file(const std::string& path, const MultipartiteState& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << write_state(s);
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

}  // namespace qdecon::cli
