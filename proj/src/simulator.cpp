#include "meld/simulator.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace meld {

Schema GenerativeSpec::schema() const {
  Schema s;
  for (const auto& v : vars) s.vars.push_back(v.var);
  s.validate();
  return s;
}

PhiMatrices GenerativeSpec::phi() const {
  PhiMatrices out;
  for (const auto& v : vars) out.push_back(v.params);
  return out;
}

void GenerativeSpec::validate() const {
  if (alpha.size() < 1) throw validation_error("generative spec needs k >= 1");
  for (int h = 0; h < alpha.size(); ++h)
    if (!(alpha[h] > 0.0)) throw validation_error("generative spec needs alpha_h > 0");
  schema();  // checks variable specs
  for (const auto& v : vars) {
    if (v.params.cols() != k())
      throw validation_error("variable '" + v.var.name + "' has " +
                             std::to_string(v.params.cols()) + " component columns, expected " +
                             std::to_string(k()));
    if (v.params.rows() != v.var.dim())
      throw validation_error("variable '" + v.var.name + "' parameter rows do not match d_j");
    if (v.var.kind == VarKind::Categorical) {
      for (int h = 0; h < k(); ++h) {
        if (v.params.col(h).minCoeff() < 0.0 || std::abs(v.params.col(h).sum() - 1.0) > 1e-9)
          throw validation_error("multinomial column of '" + v.var.name + "' is not on the simplex");
      }
    } else if (v.var.kind == VarKind::Count) {
      if (v.params.minCoeff() <= 0.0)
        throw validation_error("Poisson rates of '" + v.var.name + "' must be positive");
    } else if (!(v.sd > 0.0)) {
      throw validation_error("Gaussian sd of '" + v.var.name + "' must be positive");
    }
  }
}

namespace {

Eigen::VectorXd draw_dirichlet(std::mt19937_64& rng, const Eigen::VectorXd& alpha) {
  Eigen::VectorXd x(alpha.size());
  for (int h = 0; h < alpha.size(); ++h) {
    std::gamma_distribution<double> g(alpha[h], 1.0);
    x[h] = g(rng);
  }
  double s = x.sum();
  if (!(s > 0.0)) return Eigen::VectorXd::Constant(alpha.size(), 1.0 / alpha.size());
  return x / s;
}

int draw_categorical(std::mt19937_64& rng, const Eigen::VectorXd& probs) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  double cum = 0.0;
  for (int c = 0; c < probs.size(); ++c) {
    cum += probs[c];
    if (u < cum) return c;
  }
  return static_cast<int>(probs.size()) - 1;
}

SimulatedData sample_impl(const GenerativeSpec& spec, std::size_t n, std::uint64_t seed,
                          bool two_group) {
  spec.validate();
  if (n < 1) throw validation_error("need n >= 1");
  if (two_group) {
    if (spec.k() != 2) throw validation_error("two-group sampling needs k = 2");
    if (n % 2 != 0) throw validation_error("two-group sampling needs even n");
  }
  const int p = static_cast<int>(spec.vars.size());
  const int k = spec.k();

  SimulatedData sim;
  sim.seed = seed;
  sim.data.schema = spec.schema();
  sim.data.n = n;
  sim.data.cols.resize(p);
  for (int j = 0; j < p; ++j) {
    if (spec.vars[j].var.categorical())
      sim.data.cols[j].codes.resize(n);
    else
      sim.data.cols[j].values.resize(n);
  }
  sim.x.resize(n, k);
  sim.m.assign(n, std::vector<int>(p));

  for (std::size_t i = 0; i < n; ++i) {
    std::mt19937_64 rng(derive_seed(seed, i));
    Eigen::VectorXd x;
    if (two_group) {
      x = Eigen::VectorXd::Zero(k);
      x[i < n / 2 ? 0 : 1] = 1.0;
    } else {
      x = draw_dirichlet(rng, spec.alpha);
    }
    sim.x.row(i) = x.transpose();
    for (int j = 0; j < p; ++j) {
      int h = draw_categorical(rng, x);
      sim.m[i][j] = h;
      const auto& em = spec.vars[j];
      switch (em.var.kind) {
        case VarKind::Categorical:
          sim.data.cols[j].codes[i] = draw_categorical(rng, em.params.col(h));
          break;
        case VarKind::Continuous: {
          std::normal_distribution<double> g(em.params(0, h), em.sd);
          sim.data.cols[j].values[i] = g(rng);
          break;
        }
        case VarKind::Count: {
          std::poisson_distribution<long> pois(em.params(0, h));
          sim.data.cols[j].values[i] = static_cast<double>(pois(rng));
          break;
        }
      }
    }
  }
  return sim;
}

}  // namespace

SimulatedData sample_dataset(const GenerativeSpec& spec, std::size_t n, std::uint64_t seed) {
  return sample_impl(spec, n, seed, false);
}

SimulatedData sample_two_group_dataset(const GenerativeSpec& spec, std::size_t n,
                                       std::uint64_t seed) {
  return sample_impl(spec, n, seed, true);
}

SimulatedData contaminate(const SimulatedData& data, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0) || !(fraction <= 1.0))
    throw validation_error("contamination fraction must be in [0, 1]");
  SimulatedData out = data;
  const int p = out.data.schema.p();
  std::vector<int> cat_vars;
  for (int j = 0; j < p; ++j)
    if (out.data.schema.vars[j].categorical()) cat_vars.push_back(j);

  const std::size_t total = out.data.n * cat_vars.size();
  const std::size_t count = static_cast<std::size_t>(fraction * static_cast<double>(total));
  if (count == 0) return out;

  // partial Fisher-Yates: cells chosen without replacement
  std::mt19937_64 rng(derive_seed(seed, 0xc047));
  std::vector<std::size_t> cells(total);
  for (std::size_t c = 0; c < total; ++c) cells[c] = c;
  for (std::size_t c = 0; c < count; ++c) {
    std::uniform_int_distribution<std::size_t> pick(c, total - 1);
    std::swap(cells[c], cells[pick(rng)]);
  }
  for (std::size_t c = 0; c < count; ++c) {
    std::size_t i = cells[c] / cat_vars.size();
    int j = cat_vars[cells[c] % cat_vars.size()];
    std::uniform_int_distribution<int> lvl(0, out.data.schema.dim(j) - 1);
    out.data.cols[j].codes[i] = lvl(rng);
  }
  return out;
}

GenerativeSpec parse_generative_spec(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("generative spec is not valid JSON: ") + e.what());
  }
  GenerativeSpec spec;
  if (!doc.contains("alpha") || !doc.contains("variables"))
    throw validation_error("generative spec needs 'alpha' and 'variables'");
  auto av = doc["alpha"].get<std::vector<double>>();
  spec.alpha = Eigen::Map<Eigen::VectorXd>(av.data(), static_cast<int>(av.size()));
  for (const auto& item : doc["variables"]) {
    GenEmission em;
    em.var.name = item.at("name").get<std::string>();
    em.var.kind = var_kind_from_string(item.at("kind").get<std::string>());
    int k = spec.k();
    if (em.var.kind == VarKind::Categorical) {
      em.var.levels = item.at("levels").get<std::vector<std::string>>();
      auto rows = item.at("phi").get<std::vector<std::vector<double>>>();
      em.params.resize(static_cast<int>(rows.size()), k);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (static_cast<int>(rows[r].size()) != k)
          throw validation_error("phi row length mismatch in '" + em.var.name + "'");
        for (int h = 0; h < k; ++h) em.params(static_cast<int>(r), h) = rows[r][h];
      }
    } else {
      const char* key = em.var.kind == VarKind::Continuous ? "means" : "rates";
      auto vals = item.at(key).get<std::vector<double>>();
      if (static_cast<int>(vals.size()) != k)
        throw validation_error(std::string(key) + " length mismatch in '" + em.var.name + "'");
      em.params.resize(1, k);
      for (int h = 0; h < k; ++h) em.params(0, h) = vals[h];
      if (em.var.kind == VarKind::Continuous && item.contains("sd"))
        em.sd = item["sd"].get<double>();
    }
    spec.vars.push_back(std::move(em));
  }
  spec.validate();
  return spec;
}

GenerativeSpec load_generative_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open generative spec file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_generative_spec(ss.str());
}

}  // namespace meld
