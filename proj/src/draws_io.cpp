#include "mementum/draws_io.hpp"

#include "mementum/errors.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>

namespace mementum {

namespace {

constexpr char kMagic[8] = {'M', 'M', 'T', 'D', 'R', 'W', '0', '1'};

struct Column {
  std::uint8_t dtype = 0;
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  std::vector<double> f64;
  std::vector<std::int32_t> i32;
};

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ValidationError("truncated draws file");
  return v;
}

void append(Column& col, const MatrixXd& m) {
  // column-major flattening of each per-draw matrix
  col.f64.insert(col.f64.end(), m.data(), m.data() + m.size());
}

}  // namespace

nlohmann::json prior_to_json(const PriorSpec& p) {
  nlohmann::json j;
  j["coef_variance"] = p.coef_variance;
  j["sigma_df"] = p.sigma_df ? nlohmann::json(*p.sigma_df) : nlohmann::json(nullptr);
  j["sigma_scale"] = p.sigma_scale;
  j["stay_concentration"] = p.stay_concentration;
  j["move_concentration"] = p.move_concentration;
  j["tvp_shape"] = p.tvp_shape;
  j["tvp_scale"] = p.tvp_scale;
  j["tvp_fixed_variance"] = p.tvp_fixed_variance ? nlohmann::json(*p.tvp_fixed_variance) : nlohmann::json(nullptr);
  j["initial_factor_variance"] = p.initial_factor_variance;
  return j;
}

nlohmann::json settings_to_json(const McmcSettings& s) {
  return {{"n_draws", s.n_draws}, {"n_burnin", s.n_burnin}, {"thin", s.thin}, {"seed", s.seed}};
}

void write_draws_binary(const std::filesystem::path& path, const PosteriorDraws& draws) {
  const auto D = static_cast<std::uint64_t>(draws.draws.size());
  const auto T = draws.T;
  const auto n = draws.n;
  const FactorLayout layout(n);
  std::map<std::string, Column> cols;
  auto f64 = [&](const std::string& name, std::uint64_t width) -> Column& {
    auto& c = cols[name];
    c.dtype = 0;
    c.rows = D;
    c.cols = width;
    c.f64.reserve(D * width);
    return c;
  };
  auto& states = cols["states"];
  states.dtype = 1;
  states.rows = D;
  states.cols = static_cast<std::uint64_t>(T);
  auto& P = f64("P", static_cast<std::uint64_t>((n + 1) * (n + 1)));
  auto& c = f64("c", static_cast<std::uint64_t>(n));
  auto& B = f64("B", static_cast<std::uint64_t>(n * n));
  auto& Sigma = f64("Sigma", static_cast<std::uint64_t>(n * n));
  auto& alpha = f64("alpha", static_cast<std::uint64_t>(layout.alpha_size() * T));
  auto& lower = f64("lower", static_cast<std::uint64_t>(layout.lower_size() * T));
  auto& alpha_q = f64("alpha_innovation", static_cast<std::uint64_t>(layout.alpha_size()));
  auto& lower_q = f64("lower_innovation", static_cast<std::uint64_t>(layout.lower_size()));
  auto& loglik = f64("loglik", static_cast<std::uint64_t>(T - 2));
  for (const auto& d : draws.draws) {
    states.i32.insert(states.i32.end(), d.path.states.begin(), d.path.states.end());
    append(P, d.P);
    append(c, d.statics.c);
    append(B, d.statics.B);
    append(Sigma, d.statics.Sigma);
    append(alpha, d.factors.alpha);
    append(lower, d.factors.lower);
    append(alpha_q, d.factors.alpha_innovation);
    append(lower_q, d.factors.lower_innovation);
    append(loglik, d.loglik);
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  put(out, static_cast<std::uint32_t>(cols.size()));
  for (const auto& [name, col] : cols) {
    put(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put(out, col.dtype);
    put(out, col.rows);
    put(out, col.cols);
    if (col.dtype == 0) {
      out.write(reinterpret_cast<const char*>(col.f64.data()), static_cast<std::streamsize>(col.f64.size() * sizeof(double)));
    } else {
      out.write(reinterpret_cast<const char*>(col.i32.data()),
                static_cast<std::streamsize>(col.i32.size() * sizeof(std::int32_t)));
    }
  }
  if (!out) throw Error("write failed for " + path.string());
}

PosteriorDraws read_draws_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw ValidationError("not a draws file: " + path.string());
  const auto ncols = get<std::uint32_t>(in);
  std::map<std::string, Column> cols;
  for (std::uint32_t k = 0; k < ncols; ++k) {
    const auto len = get<std::uint32_t>(in);
    std::string name(len, '\0');
    in.read(name.data(), len);
    Column col;
    col.dtype = get<std::uint8_t>(in);
    col.rows = get<std::uint64_t>(in);
    col.cols = get<std::uint64_t>(in);
    const auto count = col.rows * col.cols;
    if (col.dtype == 0) {
      col.f64.resize(count);
      in.read(reinterpret_cast<char*>(col.f64.data()), static_cast<std::streamsize>(count * sizeof(double)));
    } else {
      col.i32.resize(count);
      in.read(reinterpret_cast<char*>(col.i32.data()), static_cast<std::streamsize>(count * sizeof(std::int32_t)));
    }
    if (!in) throw ValidationError("truncated draws file");
    cols.emplace(name, std::move(col));
  }
  for (const char* required : {"states", "P", "c", "B", "Sigma", "alpha", "lower", "alpha_innovation",
                               "lower_innovation", "loglik"}) {
    if (!cols.contains(required)) throw ValidationError(std::string("draws file lacks column ") + required);
  }

  PosteriorDraws out;
  const auto& states = cols.at("states");
  out.T = static_cast<Eigen::Index>(states.cols);
  out.n = static_cast<Eigen::Index>(cols.at("c").cols);
  const FactorLayout layout(out.n);
  const auto n = out.n, T = out.T;
  auto view = [&](const char* name, std::uint64_t d, Eigen::Index rows, Eigen::Index ncol) {
    const auto& col = cols.at(name);
    return MatrixXd(Eigen::Map<const MatrixXd>(col.f64.data() + d * col.cols, rows, ncol));
  };
  for (std::uint64_t d = 0; d < states.rows; ++d) {
    PosteriorDraw draw;
    draw.path.states.assign(states.i32.begin() + static_cast<std::ptrdiff_t>(d * states.cols),
                            states.i32.begin() + static_cast<std::ptrdiff_t>((d + 1) * states.cols));
    draw.P = view("P", d, n + 1, n + 1);
    draw.statics.c = view("c", d, 1, n);
    draw.statics.B = view("B", d, n, n);
    draw.statics.Sigma = view("Sigma", d, n, n);
    draw.factors.alpha = view("alpha", d, layout.alpha_size(), T);
    draw.factors.lower = view("lower", d, layout.lower_size(), T);
    draw.factors.alpha_innovation = view("alpha_innovation", d, layout.alpha_size(), 1);
    draw.factors.lower_innovation = view("lower_innovation", d, layout.lower_size(), 1);
    draw.loglik = view("loglik", d, T - 2, 1);
    out.draws.push_back(std::move(draw));
  }
  return out;
}

nlohmann::json draws_manifest(const PosteriorDraws& draws, const std::string& draws_file, const std::string& input_hash,
                              const std::string& config_hash) {
  nlohmann::json j;
  j["format"] = "mementum-draws/1";
  j["draws_file"] = draws_file;
  j["seed"] = draws.settings.seed;
  j["settings"] = settings_to_json(draws.settings);
  j["priors"] = prior_to_json(draws.prior);
  j["input_hash"] = input_hash;
  j["config_hash"] = config_hash;
  j["T"] = draws.T;
  j["n"] = draws.n;
  j["retained_draws"] = draws.draws.size();
  j["counters"] = {{"sweeps", draws.counters.sweeps},
                   {"ridge_fallbacks", draws.counters.ridge_fallbacks},
                   {"covariance_repairs", draws.counters.covariance_repairs}};
  return j;
}

}  // namespace mementum
