#include "ccdist/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ccdist {

using nlohmann::json;

StepTwoGroup parse_group_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("group spec: ") + e.what());
  }
  if (!j.contains("q") || !j.contains("m") || !j.contains("U"))
    throw ParseError("group spec: required keys q, m, U");
  const int q = j["q"].get<int>();
  const int m = j["m"].get<int>();
  if (q < 1 || m < 1) throw ParseError("group spec: q and m must be positive");
  if (!j["U"].is_array() || static_cast<int>(j["U"].size()) != m)
    throw ParseError("group spec: U must be a list of m matrices");
  std::vector<Eigen::MatrixXd> Us;
  for (int k = 0; k < m; ++k) {
    const auto& Mj = j["U"][k];
    if (!Mj.is_array() || static_cast<int>(Mj.size()) != q)
      throw ParseError("group spec: U[" + std::to_string(k) + "] must have " +
                       std::to_string(q) + " rows");
    Eigen::MatrixXd M(q, q);
    for (int r = 0; r < q; ++r) {
      const auto& row = Mj[r];
      if (!row.is_array() || static_cast<int>(row.size()) != q)
        throw ParseError("group spec: U[" + std::to_string(k) + "] row " + std::to_string(r) +
                         " must have " + std::to_string(q) + " entries");
      for (int c = 0; c < q; ++c) {
        if (!row[c].is_number())
          throw ParseError("group spec: U[" + std::to_string(k) + "][" + std::to_string(r) +
                           "][" + std::to_string(c) + "] is not a number");
        M(r, c) = row[c].get<double>();
      }
    }
    Us.push_back(M);
  }
  return validate_group(Us);
}

std::string group_to_json(const StepTwoGroup& G) {
  json j;
  j["q"] = G.q;
  j["m"] = G.m;
  json U = json::array();
  for (const auto& M : G.U) {
    json rows = json::array();
    for (int r = 0; r < G.q; ++r) {
      json row = json::array();
      for (int c = 0; c < G.q; ++c) row.push_back(M(r, c));
      rows.push_back(row);
    }
    U.push_back(rows);
  }
  j["U"] = U;
  return j.dump();
}

StepTwoGroup load_group(const std::string& name_or_path) {
  std::error_code ec;
  if (std::filesystem::exists(name_or_path, ec)) {
    std::ifstream in(name_or_path);
    if (!in) throw ParseError("cannot read group spec file: " + name_or_path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_group_json(buf.str());
  }
  return builtin_group(name_or_path);
}

namespace {

std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> out;
  std::string cur;
  std::stringstream ss(text);
  while (std::getline(ss, cur, ',')) {
    try {
      size_t pos = 0;
      const double v = std::stod(cur, &pos);
      while (pos < cur.size() && std::isspace(static_cast<unsigned char>(cur[pos]))) ++pos;
      if (pos != cur.size()) throw std::invalid_argument(cur);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ParseError("cannot parse number: '" + cur + "'");
    }
  }
  return out;
}

}  // namespace

GroupPoint parse_point(const std::string& text, const StepTwoGroup& G) {
  const auto semi = text.find(';');
  if (semi == std::string::npos) throw ParseError("point must be 'x1,...,xq;t1,...,tm'");
  const std::vector<double> xs = parse_csv_doubles(text.substr(0, semi));
  const std::vector<double> ts = parse_csv_doubles(text.substr(semi + 1));
  if (static_cast<int>(xs.size()) != G.q)
    throw ParseError("point has " + std::to_string(xs.size()) + " horizontal entries, expected " +
                     std::to_string(G.q));
  if (static_cast<int>(ts.size()) != G.m)
    throw ParseError("point has " + std::to_string(ts.size()) + " vertical entries, expected " +
                     std::to_string(G.m));
  GroupPoint g{Eigen::VectorXd(G.q), Eigen::VectorXd(G.m)};
  for (int i = 0; i < G.q; ++i) g.x[i] = xs[i];
  for (int i = 0; i < G.m; ++i) g.t[i] = ts[i];
  return g;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string group_digest(const StepTwoGroup& G) {
  const std::string canon = group_to_json(G);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ccdist
