#include "latebench/trec_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <vector>

namespace latebench {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

// Calls fn(line_number, columns) for each non-blank, non-comment line.
template <typename Fn>
void for_each_record(std::string_view text, Fn&& fn) {
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    const auto cols = split_ws(line);
    if (cols.empty() || cols.front().front() == '#') continue;
    fn(line_no, cols);
  }
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& what) {
  fail(ErrorCode::kMalformedLine, "line " + std::to_string(line_no) + ": " + what);
}

template <typename T>
T parse_number(std::string_view s, std::size_t line_no, const char* what) {
  T value{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    malformed(line_no, std::string("bad ") + what + " '" + std::string(s) + "'");
  }
  return value;
}

}  // namespace

Qrels parse_qrels(std::string_view text) {
  Qrels qrels;
  for_each_record(text, [&](std::size_t line_no, const std::vector<std::string_view>& cols) {
    if (cols.size() != 4) malformed(line_no, "qrels needs 4 columns, found " + std::to_string(cols.size()));
    const int grade = parse_number<int>(cols[3], line_no, "grade");
    if (grade < 0) malformed(line_no, "negative grade");
    try {
      qrels.add(std::string(cols[0]), std::string(cols[2]), grade);
    } catch (const Error& e) {
      fail(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  });
  return qrels;
}

std::string write_qrels(const Qrels& qrels) {
  std::string out;
  for (const auto& [qid, docs] : qrels.judgments()) {
    for (const auto& [doc, grade] : docs) out += qid + " 0 " + doc + " " + std::to_string(grade) + "\n";
  }
  return out;
}

Run parse_run(std::string_view text) {
  struct Line {
    ScoredDoc doc;
    long rank;
  };
  std::map<std::string, std::vector<Line>> by_query;
  std::map<std::string, std::set<std::string>> seen;
  for_each_record(text, [&](std::size_t line_no, const std::vector<std::string_view>& cols) {
    if (cols.size() != 6) malformed(line_no, "run needs 6 columns, found " + std::to_string(cols.size()));
    const long rank = parse_number<long>(cols[3], line_no, "rank");
    const double score = parse_number<double>(cols[4], line_no, "score");
    if (!std::isfinite(score)) malformed(line_no, "non-finite score");
    std::string qid(cols[0]);
    std::string doc(cols[2]);
    if (!seen[qid].insert(doc).second) malformed(line_no, "document '" + doc + "' repeated for query '" + qid + "'");
    by_query[qid].push_back({{std::move(doc), score}, rank});
  });

  Run run;
  for (auto& [qid, lines] : by_query) {
    std::stable_sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return ranks_before(a.doc, b.doc); });
    RankedList list{qid, {}};
    bool contiguous = true;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      contiguous = contiguous && lines[i].rank == static_cast<long>(i + 1);
      list.docs.push_back(std::move(lines[i].doc));
    }
    if (!contiguous) warn("query '" + qid + "': ranks are not 1..n in score order; ordering by score");
    run.lists.emplace(qid, std::move(list));
  }
  return run;
}

std::string format_score(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string write_run(const Run& run, std::string_view tag) {
  if (tag.empty() || tag.find_first_of(" \t\r\n") != std::string_view::npos) {
    fail(ErrorCode::kInvalidArgument, "run tag must be a non-empty token");
  }
  std::string out;
  for (const auto& [qid, list] : run.lists) {
    std::set<std::string_view> seen;
    for (std::size_t i = 0; i < list.docs.size(); ++i) {
      const ScoredDoc& d = list.docs[i];
      if (!seen.insert(d.doc_id).second) {
        fail(ErrorCode::kNonContiguousRanks, "query '" + qid + "' repeats document '" + d.doc_id + "'");
      }
      if (i > 0 && !ranks_before(list.docs[i - 1], d)) {
        fail(ErrorCode::kNonContiguousRanks,
             "query '" + qid + "' is not in score order at rank " + std::to_string(i + 1));
      }
      out += qid;
      out += " Q0 ";
      out += d.doc_id;
      out += ' ';
      out += std::to_string(i + 1);
      out += ' ';
      out += format_score(d.score);
      out += ' ';
      out += tag;
      out += '\n';
    }
  }
  return out;
}

}  // namespace latebench
