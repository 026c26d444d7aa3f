#include "sparselab/cli/instance_file.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sparselab/errors.hpp"

namespace sparselab::cli {
namespace {

using nlohmann::json;

const json& field(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double number(const json& obj, const std::string& path, const char* key) {
  const json& v = field(obj, path, key);
  if (!v.is_number()) throw ParseError(join(path, key), "expected a number");
  return v.get<double>();
}

long long integer(const json& obj, const std::string& path, const char* key) {
  const json& v = field(obj, path, key);
  if (!v.is_number_integer()) throw ParseError(join(path, key), "expected an integer");
  return v.get<long long>();
}

std::string text(const json& obj, const std::string& path, const char* key) {
  const json& v = field(obj, path, key);
  if (!v.is_string()) throw ParseError(join(path, key), "expected a string");
  return v.get<std::string>();
}

Weight parse_weight(const json& obj, const std::string& path) {
  const std::string kind = text(obj, path, "kind");
  if (kind == "lebesgue") return Weight::lebesgue();
  if (kind == "power") {
    const double beta = number(obj, path, "beta");
    const double coef = obj.contains("coefficient") ? number(obj, path, "coefficient") : 1.0;
    try {
      return Weight::power(beta, coef);
    } catch (const ParameterError& e) {
      throw ParseError(join(path, "beta"), e.what());
    }
  }
  if (kind == "piecewise") {
    const long long depth = integer(obj, path, "depth");
    if (depth < 0 || depth > 20) throw ParseError(join(path, "depth"), "expected 0 <= depth <= 20");
    const json& vals = field(obj, path, "values");
    const std::string vpath = join(path, "values");
    if (!vals.is_array()) throw ParseError(vpath, "expected an array");
    if (vals.size() != (std::size_t{1} << depth)) {
      throw ParseError(vpath, "expected 2^depth = " + std::to_string(1LL << depth) + " values");
    }
    Eigen::VectorXd values(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (!vals[i].is_number() || vals[i].get<double>() < 0.0) {
        throw ParseError(vpath + "[" + std::to_string(i) + "]", "expected a nonnegative number");
      }
      values[static_cast<Eigen::Index>(i)] = vals[i].get<double>();
    }
    return Weight::piecewise(DyadicInterval{0, 0}, static_cast<int>(depth), std::move(values));
  }
  throw ParseError(join(path, "kind"), "unknown weight kind '" + kind + "' (lebesgue, power, piecewise)");
}

SparseFamily parse_family(const json& obj) {
  const std::string kind = text(obj, "family", "kind");
  if (kind == "chain") {
    const long long k = integer(obj, "family", "K");
    if (k < 0 || k > 40) throw ParseError("family.K", "expected 0 <= K <= 40");
    return chain_family(static_cast<int>(k));
  }
  if (kind == "explicit") {
    const json& list = field(obj, "family", "members");
    if (!list.is_array() || list.empty()) throw ParseError("family.members", "expected a nonempty array");
    std::vector<DyadicInterval> members;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string mpath = "family.members[" + std::to_string(i) + "]";
      const json& m = list[i];
      if (!m.is_array() || m.size() != 2 || !m[0].is_number_integer() || !m[1].is_number_integer()) {
        throw ParseError(mpath, "expected [level, position]");
      }
      const auto level = m[0].get<long long>();
      const auto pos = m[1].get<long long>();
      if (level < 0 || level > 40 || pos < 0 || pos >= (1LL << level)) {
        throw ParseError(mpath, "expected 0 <= level <= 40 and 0 <= position < 2^level");
      }
      members.push_back({static_cast<int>(level), pos});
    }
    std::optional<double> eta;
    if (obj.contains("eta")) eta = number(obj, "family", "eta");
    try {
      return make_family(std::move(members), DyadicInterval{0, 0}, eta);
    } catch (const std::exception& e) {
      throw ParseError("family", e.what());
    }
  }
  throw ParseError("family.kind", "unknown family kind '" + kind + "' (chain, explicit)");
}

}  // namespace

std::string digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

InstanceFile parse_instance(const std::string& source) {
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error& e) {
    throw ParseError("<document>", e.what());
  }
  if (!doc.is_object()) throw ParseError("<document>", "expected a JSON object");

  InstanceFile out;
  const json& ex = field(doc, "", "exponents");
  out.cfg = ExponentConfig::make(number(ex, "exponents", "p"), number(ex, "exponents", "q"),
                                 number(ex, "exponents", "r"), number(ex, "exponents", "alpha"));
  out.family = parse_family(field(doc, "", "family"));
  out.omega = parse_weight(field(doc, "", "omega"), "omega");
  out.sigma = parse_weight(field(doc, "", "sigma"), "sigma");

  if (doc.contains("options")) {
    const json& opt = doc["options"];
    if (!opt.is_object()) throw ParseError("options", "expected an object");
    if (opt.contains("seed")) {
      const long long s = integer(opt, "options", "seed");
      if (s < 0) throw ParseError("options.seed", "expected a nonnegative integer");
      out.ascent.seed = static_cast<std::uint64_t>(s);
    }
    if (opt.contains("restarts")) {
      const long long v = integer(opt, "options", "restarts");
      if (v < 0 || v > 10000) throw ParseError("options.restarts", "expected 0 <= restarts <= 10000");
      out.ascent.restarts = static_cast<int>(v);
    }
    if (opt.contains("max_iters")) {
      const long long v = integer(opt, "options", "max_iters");
      if (v < 1) throw ParseError("options.max_iters", "expected a positive integer");
      out.ascent.max_iters = static_cast<int>(v);
    }
    if (opt.contains("tol")) {
      out.ascent.tol = number(opt, "options", "tol");
      if (!(out.ascent.tol > 0.0)) throw ParseError("options.tol", "expected a positive number");
    }
    if (opt.contains("depth")) {
      const long long d = integer(opt, "options", "depth");
      if (d < 0 || d > 24) throw ParseError("options.depth", "expected 0 <= depth <= 24");
      out.depth = static_cast<int>(d);
    }
  }
  out.digest = digest(source);
  return out;
}

InstanceFile load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("<file>", "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

}  // namespace sparselab::cli
