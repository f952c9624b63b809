#include "mementum/regime_extract.hpp"

#include "mementum/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mementum {

RankPosterior summarize(const std::vector<RankPath>& paths, Eigen::Index states) {
  if (paths.empty()) throw ValidationError("no retained draws to summarize");
  const auto T = paths.front().size();
  RankPosterior out;
  out.probs = MatrixXd::Zero(static_cast<Eigen::Index>(T), states);
  for (const auto& p : paths) {
    if (p.size() != T) throw ValidationError("draws have unequal path lengths");
    for (std::size_t t = 0; t < T; ++t) {
      const int s = p.states[t];
      if (s < 1 || s > states) throw DomainError("state " + std::to_string(s) + " out of range");
      out.probs(static_cast<Eigen::Index>(t), s - 1) += 1.0;
    }
  }
  out.probs /= static_cast<double>(paths.size());
  out.map_path.states.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    // strict comparison keeps the lowest state among ties
    Eigen::Index best = 0;
    for (Eigen::Index s = 1; s < states; ++s) {
      if (out.probs(static_cast<Eigen::Index>(t), s) > out.probs(static_cast<Eigen::Index>(t), best)) best = s;
    }
    out.map_path.states[t] = static_cast<int>(best) + 1;
  }
  return out;
}

RankPosterior summarize(const PosteriorDraws& draws) {
  std::vector<RankPath> paths;
  paths.reserve(draws.draws.size());
  for (const auto& d : draws.draws) paths.push_back(d.path);
  return summarize(paths, draws.n + 1);
}

RegimeIntervals to_intervals(const RankPath& path, const std::vector<Date>& dates) {
  if (!dates.empty() && dates.size() != path.size()) throw ValidationError("path and calendar lengths differ");
  RegimeIntervals out;
  out.calendar = dates;
  for (std::size_t t = 0; t < path.size(); ++t) {
    const int rank = path.rank(t);
    if (!out.intervals.empty() && out.intervals.back().rank == rank) {
      out.intervals.back().end = t;
    } else {
      out.intervals.push_back({t, t, rank});
    }
  }
  return out;
}

RankPath expand(const RegimeIntervals& intervals) {
  RankPath out;
  for (const auto& iv : intervals.intervals) {
    for (std::size_t t = iv.start; t <= iv.end; ++t) out.states.push_back(iv.rank + 1);
  }
  return out;
}

void write_regime_csv(const std::filesystem::path& path, const std::vector<Date>& dates, const RankPosterior& posterior,
                      const std::string& config_hash, const std::string& ticker) {
  const auto T = static_cast<Eigen::Index>(dates.size());
  if (posterior.probs.rows() != T || posterior.map_path.size() != dates.size()) {
    throw ValidationError("regime posterior does not match calendar");
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "# config_hash=" << config_hash << '\n';
  if (!ticker.empty()) out << "# ticker=" << ticker << '\n';
  out << "date,state,rank";
  for (Eigen::Index s = 0; s < posterior.probs.cols(); ++s) out << ",p_rank" << s;
  out << '\n';
  char buf[40];
  for (Eigen::Index t = 0; t < T; ++t) {
    const int state = posterior.map_path.states[static_cast<std::size_t>(t)];
    out << format_date(dates[static_cast<std::size_t>(t)]) << ',' << state << ',' << state - 1;
    for (Eigen::Index s = 0; s < posterior.probs.cols(); ++s) {
      std::snprintf(buf, sizeof buf, "%.6f", posterior.probs(t, s));
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw Error("write failed for " + path.string());
}

RegimeTable read_regime_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  RegimeTable table;
  std::vector<std::vector<double>> prob_rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string hash_key = "# config_hash=";
      const std::string ticker_key = "# ticker=";
      if (line.rfind(hash_key, 0) == 0) table.config_hash = line.substr(hash_key.size());
      if (line.rfind(ticker_key, 0) == 0) table.ticker = line.substr(ticker_key.size());
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("date,", 0) == 0) continue;
    }
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() < 4) throw ParseError("regime row needs date,state,rank,p_rank...", line_no);
    const auto date = parse_date(fields[0]);
    if (!date) throw ParseError("malformed date '" + fields[0] + "'", line_no);
    char* end = nullptr;
    const long state = std::strtol(fields[1].c_str(), &end, 10);
    if (*end != '\0') throw ParseError("malformed state '" + fields[1] + "'", line_no);
    std::vector<double> probs;
    for (std::size_t k = 3; k < fields.size(); ++k) {
      probs.push_back(std::strtod(fields[k].c_str(), &end));
      if (*end != '\0') throw ParseError("malformed probability '" + fields[k] + "'", line_no);
    }
    if (!prob_rows.empty() && probs.size() != prob_rows.front().size()) {
      throw ParseError("inconsistent number of probability columns", line_no);
    }
    if (state < 1 || state > static_cast<long>(probs.size())) throw ParseError("state out of range", line_no);
    table.dates.push_back(*date);
    table.posterior.map_path.states.push_back(static_cast<int>(state));
    prob_rows.push_back(std::move(probs));
  }
  if (table.dates.empty()) throw ValidationError("no observations in " + path.string());
  const auto N = static_cast<Eigen::Index>(prob_rows.front().size());
  table.posterior.probs.resize(static_cast<Eigen::Index>(prob_rows.size()), N);
  for (std::size_t t = 0; t < prob_rows.size(); ++t) {
    for (Eigen::Index s = 0; s < N; ++s) table.posterior.probs(static_cast<Eigen::Index>(t), s) = prob_rows[t][static_cast<std::size_t>(s)];
  }
  return table;
}

}  // namespace mementum
