#include "pddagp/model.hpp"

#include <cmath>
#include <random>

namespace pddagp {

double dist(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

std::vector<double> ScenarioConfig::omega_or_default() const {
  if (!omega.empty()) return omega;
  return std::vector<double>(m_i, 1.0);
}

std::vector<double> ScenarioConfig::alpha_or_default() const {
  if (!alpha.empty()) return alpha;
  return std::vector<double>(m_e, 1.0);
}

void validate(const ScenarioConfig& cfg) {
  auto bad = [](const std::string& what) { throw ConfigError("scenario: " + what); };
  if (cfg.n_b < 1 || cfg.n_i < 1 || cfg.n_e < 1 || cfg.m_i < 1 || cfg.m_e < 1)
    bad("antenna and receiver counts must be >= 1");
  if (!(cfg.eta > 0.0) || cfg.eta > 1.0) bad("eta must lie in (0, 1]");
  if (!(cfg.p_th_mw > 0.0)) bad("p_th_mw must be positive");
  if (!(cfg.bandwidth_hz > 0.0)) bad("bandwidth_hz must be positive");
  if (cfg.ir_radius < 0.0 || cfg.er_radius < 0.0) bad("radii must be >= 0");
  if (!cfg.omega.empty() && cfg.omega.size() != cfg.m_i)
    bad("omega length must equal m_i");
  if (!cfg.alpha.empty() && cfg.alpha.size() != cfg.m_e)
    bad("alpha length must equal m_e");
  for (double w : cfg.omega)
    if (!(w > 0.0)) bad("omega entries must be positive");
  for (double a : cfg.alpha)
    if (!(a > 0.0)) bad("alpha entries must be positive");
}

double noise_power(const ScenarioConfig& cfg) {
  return std::pow(10.0, (cfg.noise_psd_dbm_hz - 30.0) / 10.0) * cfg.bandwidth_hz;
}

double power_budget_w(const ScenarioConfig& cfg) {
  return std::pow(10.0, (cfg.p_b_dbm - 30.0) / 10.0);
}

double p_tilde(const ScenarioConfig& cfg) {
  return (cfg.p_th_mw * 1e-3) / noise_power(cfg);
}

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) { ok = true; break; }
    if (!ok) throw ConfigError(where + ": unknown field '" + it.key() + "'");
  }
}

Vec2 vec2_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2)
    throw ConfigError(where + ": expected [x, y]");
  return Vec2{j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("scenario: expected a JSON object");
  reject_unknown(j,
                 {"n_b", "n_i", "n_e", "n_s", "m_i", "m_e", "p_b_dbm",
                  "p_th_mw", "eta", "omega", "alpha", "noise_psd_dbm_hz",
                  "bandwidth_hz", "bs_pos", "irs_pos", "ir_center", "ir_radius",
                  "er_center_x", "er_radius", "pathloss", "fading", "seed"},
                 "scenario");
  ScenarioConfig c;
  try {
    if (j.contains("n_b")) c.n_b = j["n_b"].get<std::size_t>();
    if (j.contains("n_i")) c.n_i = j["n_i"].get<std::size_t>();
    if (j.contains("n_e")) c.n_e = j["n_e"].get<std::size_t>();
    if (j.contains("n_s")) c.n_s = j["n_s"].get<std::size_t>();
    if (j.contains("m_i")) c.m_i = j["m_i"].get<std::size_t>();
    if (j.contains("m_e")) c.m_e = j["m_e"].get<std::size_t>();
    if (j.contains("p_b_dbm")) c.p_b_dbm = j["p_b_dbm"].get<double>();
    if (j.contains("p_th_mw")) c.p_th_mw = j["p_th_mw"].get<double>();
    if (j.contains("eta")) c.eta = j["eta"].get<double>();
    if (j.contains("omega")) c.omega = j["omega"].get<std::vector<double>>();
    if (j.contains("alpha")) c.alpha = j["alpha"].get<std::vector<double>>();
    if (j.contains("noise_psd_dbm_hz"))
      c.noise_psd_dbm_hz = j["noise_psd_dbm_hz"].get<double>();
    if (j.contains("bandwidth_hz")) c.bandwidth_hz = j["bandwidth_hz"].get<double>();
    if (j.contains("bs_pos")) c.bs_pos = vec2_from(j["bs_pos"], "bs_pos");
    if (j.contains("irs_pos")) c.irs_pos = vec2_from(j["irs_pos"], "irs_pos");
    if (j.contains("ir_center")) c.ir_center = vec2_from(j["ir_center"], "ir_center");
    if (j.contains("ir_radius")) c.ir_radius = j["ir_radius"].get<double>();
    if (j.contains("er_center_x")) c.er_center_x = j["er_center_x"].get<double>();
    if (j.contains("er_radius")) c.er_radius = j["er_radius"].get<double>();
    if (j.contains("pathloss")) {
      const json& p = j["pathloss"];
      reject_unknown(p,
                     {"c0_db", "alpha_bs_irs", "alpha_irs_ir", "alpha_irs_er",
                      "alpha_bs_ir", "alpha_bs_er"},
                     "pathloss");
      if (p.contains("c0_db")) c.pathloss.c0_db = p["c0_db"].get<double>();
      if (p.contains("alpha_bs_irs"))
        c.pathloss.alpha_bs_irs = p["alpha_bs_irs"].get<double>();
      if (p.contains("alpha_irs_ir"))
        c.pathloss.alpha_irs_ir = p["alpha_irs_ir"].get<double>();
      if (p.contains("alpha_irs_er"))
        c.pathloss.alpha_irs_er = p["alpha_irs_er"].get<double>();
      if (p.contains("alpha_bs_ir"))
        c.pathloss.alpha_bs_ir = p["alpha_bs_ir"].get<double>();
      if (p.contains("alpha_bs_er"))
        c.pathloss.alpha_bs_er = p["alpha_bs_er"].get<double>();
    }
    if (j.contains("fading")) {
      const json& f = j["fading"];
      reject_unknown(
          f, {"k_bs_irs", "k_irs_ir", "k_irs_er", "k_bs_ir", "k_bs_er"},
          "fading");
      if (f.contains("k_bs_irs")) c.fading.k_bs_irs = f["k_bs_irs"].get<double>();
      if (f.contains("k_irs_ir")) c.fading.k_irs_ir = f["k_irs_ir"].get<double>();
      if (f.contains("k_irs_er")) c.fading.k_irs_er = f["k_irs_er"].get<double>();
      if (f.contains("k_bs_ir")) c.fading.k_bs_ir = f["k_bs_ir"].get<double>();
      if (f.contains("k_bs_er")) c.fading.k_bs_er = f["k_bs_er"].get<double>();
    }
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  validate(c);
  return c;
}

nlohmann::json scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["n_b"] = c.n_b;
  j["n_i"] = c.n_i;
  j["n_e"] = c.n_e;
  j["n_s"] = c.n_s;
  j["m_i"] = c.m_i;
  j["m_e"] = c.m_e;
  j["p_b_dbm"] = c.p_b_dbm;
  j["p_th_mw"] = c.p_th_mw;
  j["eta"] = c.eta;
  j["omega"] = c.omega_or_default();
  j["alpha"] = c.alpha_or_default();
  j["noise_psd_dbm_hz"] = c.noise_psd_dbm_hz;
  j["bandwidth_hz"] = c.bandwidth_hz;
  j["bs_pos"] = {c.bs_pos.x, c.bs_pos.y};
  j["irs_pos"] = {c.irs_pos.x, c.irs_pos.y};
  j["ir_center"] = {c.ir_center.x, c.ir_center.y};
  j["ir_radius"] = c.ir_radius;
  j["er_center_x"] = c.er_center_x;
  j["er_radius"] = c.er_radius;
  j["pathloss"] = {{"c0_db", c.pathloss.c0_db},
                   {"alpha_bs_irs", c.pathloss.alpha_bs_irs},
                   {"alpha_irs_ir", c.pathloss.alpha_irs_ir},
                   {"alpha_irs_er", c.pathloss.alpha_irs_er},
                   {"alpha_bs_ir", c.pathloss.alpha_bs_ir},
                   {"alpha_bs_er", c.pathloss.alpha_bs_er}};
  j["fading"] = {{"k_bs_irs", c.fading.k_bs_irs},
                 {"k_irs_ir", c.fading.k_irs_ir},
                 {"k_irs_er", c.fading.k_irs_er},
                 {"k_bs_ir", c.fading.k_bs_ir},
                 {"k_bs_er", c.fading.k_bs_er}};
  j["seed"] = c.seed;
  return j;
}

void ChannelSet::normalize(double sigma) {
  if (normalized)
    throw AlreadyNormalizedError("ChannelSet: already noise-normalized");
  if (!(sigma > 0.0)) throw ConfigError("ChannelSet: sigma must be positive");
  const cxd inv = 1.0 / sigma;
  h_s *= inv;
  for (CMatrix& m : h_i) m *= inv;
  for (CMatrix& m : h_e) m *= inv;
  normalized = true;
}

namespace {

double pathloss_lin(double c0_db, double alpha, double d) {
  return std::pow(10.0, c0_db / 10.0) * std::pow(d, -alpha);
}

CMatrix draw_link(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                  double pl, double k_factor) {
  std::uniform_real_distribution<double> uphase(0.0, 2.0 * M_PI);
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(2.0));
  const double amp = std::sqrt(pl);
  const double w_los = std::sqrt(k_factor / (1.0 + k_factor));
  const double w_nlos = std::sqrt(1.0 / (1.0 + k_factor));

  std::vector<cxd> a(rows), b(cols);
  for (cxd& v : a) v = std::polar(1.0, uphase(rng));
  for (cxd& v : b) v = std::polar(1.0, uphase(rng));

  CMatrix h(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const cxd los = a[i] * std::conj(b[j]);
      const cxd w = cxd(gauss(rng), gauss(rng));
      h(i, j) = amp * (w_los * los + w_nlos * w);
    }
  return h;
}

Vec2 draw_in_disc(std::mt19937_64& rng, const Vec2& center, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = radius * std::sqrt(u(rng));
  const double th = 2.0 * M_PI * u(rng);
  return Vec2{center.x + r * std::cos(th), center.y + r * std::sin(th)};
}

}  // namespace

ChannelSet generate_channels(const ScenarioConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  std::mt19937_64 rng(seed);

  std::vector<Vec2> ir_pos(cfg.m_i), er_pos(cfg.m_e);
  for (Vec2& p : ir_pos) p = draw_in_disc(rng, cfg.ir_center, cfg.ir_radius);
  const Vec2 er_center{cfg.er_center_x, 0.0};
  for (Vec2& p : er_pos) p = draw_in_disc(rng, er_center, cfg.er_radius);

  auto link_dist = [&](const Vec2& a, const Vec2& b) {
    const double d = dist(a, b);
    if (d == 0.0)
      throw DegenerateGeometryError("generate_channels: zero link distance");
    return d;
  };

  const PathLoss& pl = cfg.pathloss;
  const Fading& fd = cfg.fading;

  ChannelSet ch;
  ch.h_s = draw_link(rng, cfg.n_s, cfg.n_b,
                     pathloss_lin(pl.c0_db, pl.alpha_bs_irs,
                                  link_dist(cfg.bs_pos, cfg.irs_pos)),
                     fd.k_bs_irs);
  ch.h_i.reserve(cfg.m_i);
  for (const Vec2& p : ir_pos)
    ch.h_i.push_back(draw_link(
        rng, cfg.n_i, cfg.n_b,
        pathloss_lin(pl.c0_db, pl.alpha_bs_ir, link_dist(cfg.bs_pos, p)),
        fd.k_bs_ir));
  ch.h_e.reserve(cfg.m_e);
  for (const Vec2& p : er_pos)
    ch.h_e.push_back(draw_link(
        rng, cfg.n_e, cfg.n_b,
        pathloss_lin(pl.c0_db, pl.alpha_bs_er, link_dist(cfg.bs_pos, p)),
        fd.k_bs_er));
  ch.g_i.reserve(cfg.m_i);
  for (const Vec2& p : ir_pos)
    ch.g_i.push_back(draw_link(
        rng, cfg.n_i, cfg.n_s,
        pathloss_lin(pl.c0_db, pl.alpha_irs_ir, link_dist(cfg.irs_pos, p)),
        fd.k_irs_ir));
  ch.g_e.reserve(cfg.m_e);
  for (const Vec2& p : er_pos)
    ch.g_e.push_back(draw_link(
        rng, cfg.n_e, cfg.n_s,
        pathloss_lin(pl.c0_db, pl.alpha_irs_er, link_dist(cfg.irs_pos, p)),
        fd.k_irs_er));

  ch.normalize(std::sqrt(noise_power(cfg)));
  return ch;
}

EffectiveChannels effective_channels(const ChannelSet& ch,
                                     const std::vector<cxd>& phi,
                                     kernels::Exec ex) {
  if (!ch.normalized)
    throw InternalError("effective_channels: channels must be normalized");
  if (phi.size() != ch.h_s.rows())
    throw DimensionMismatchError("effective_channels: phi length != n_s");
  EffectiveChannels eff;
  eff.z.reserve(ch.h_i.size());
  for (std::size_t m = 0; m < ch.h_i.size(); ++m)
    eff.z.push_back(kernels::compose_reflected(ch.h_i[m], ch.g_i[m], phi, ch.h_s, ex));
  eff.xi.reserve(ch.h_e.size());
  for (std::size_t l = 0; l < ch.h_e.size(); ++l)
    eff.xi.push_back(kernels::compose_reflected(ch.h_e[l], ch.g_e[l], phi, ch.h_s, ex));
  return eff;
}

}  // namespace pddagp
