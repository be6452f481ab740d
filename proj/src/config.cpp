#include "optoresponse/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <fmt/format.h>
#include "optoresponse/errors.hpp"

namespace optoresponse
{

namespace
{

std::string Trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
  {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double ParseDouble(const std::string &key, const std::string &value)
{
  double x = 0.0;
  const char *end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, x);
  if (ec != std::errc() || ptr != end || !std::isfinite(x))
  {
    throw InvalidParameter(fmt::format("{}: '{}' is not a finite number", key, value));
  }
  return x;
}

int ParseInt(const std::string &key, const std::string &value)
{
  int x = 0;
  const char *end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, x);
  if (ec != std::errc() || ptr != end)
  {
    throw InvalidParameter(fmt::format("{}: '{}' is not an integer", key, value));
  }
  return x;
}

bool ParseSwitch(const std::string &key, const std::string &value)
{
  if (value == "on" || value == "true" || value == "1")
  {
    return true;
  }
  if (value == "off" || value == "false" || value == "0")
  {
    return false;
  }
  throw InvalidParameter(fmt::format("{}: expected on|off, got '{}'", key, value));
}

std::vector<std::string> SplitList(const std::string &value)
{
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ','))
  {
    item = Trim(item);
    if (!item.empty())
    {
      items.push_back(item);
    }
  }
  return items;
}

std::vector<int> ParseJSet(const std::string &value)
{
  std::vector<int> js;
  for (const auto &item : SplitList(value))
  {
    const int j = ParseInt("j_set", item);
    if (j < 1 || j > 4)
    {
      throw InvalidParameter(fmt::format("j_set entries must be in 1..4, got {}", j));
    }
    if (std::find(js.begin(), js.end(), j) == js.end())
    {
      js.push_back(j);
    }
  }
  if (js.empty())
  {
    throw InvalidParameter("j_set is empty");
  }
  return js;
}

// "4x4,6x6" -> {(4,4),(6,6)}
std::vector<std::pair<int, int>> ParseScan(const std::string &value)
{
  std::vector<std::pair<int, int>> pairs;
  for (const auto &item : SplitList(value))
  {
    const auto x = item.find('x');
    if (x == std::string::npos)
    {
      throw InvalidParameter(fmt::format("scan entry '{}' is not of the form NAxNB", item));
    }
    pairs.emplace_back(ParseInt("scan", item.substr(0, x)), ParseInt("scan", item.substr(x + 1)));
  }
  return pairs;
}

OracleBlock &EnsureOracle(RunConfig &c)
{
  if (!c.oracle)
  {
    c.oracle.emplace();
  }
  return *c.oracle;
}

void ApplyPair(RunConfig &c, const std::string &key, const std::string &value)
{
  auto both = [&](double EffectiveParams::*fe, double PhysicalParams::*fp) {
    const double x = ParseDouble(key, value);
    c.effective.*fe = x;
    c.physical.*fp = x;
  };
  if (key == "mode")
  {
    if (value == "effective")
      c.mode = InputMode::Effective;
    else if (value == "physical")
      c.mode = InputMode::Physical;
    else
      throw InvalidParameter(fmt::format("mode must be effective|physical, got '{}'", value));
  }
  else if (key == "delta")
    c.effective.delta = ParseDouble(key, value);
  else if (key == "g")
    c.effective.g = ParseDouble(key, value);
  else if (key == "delta_c" || key == "eta_mag")
  {
    (key == "delta_c" ? c.physical.delta_c : c.physical.eta_mag) = ParseDouble(key, value);
    c.physical_keys.push_back(key);
  }
  else if (key == "omega_m")
    both(&EffectiveParams::omega_m, &PhysicalParams::omega_m);
  else if (key == "kappa")
    both(&EffectiveParams::kappa, &PhysicalParams::kappa);
  else if (key == "gamma")
    both(&EffectiveParams::gamma, &PhysicalParams::gamma);
  else if (key == "g0")
    both(&EffectiveParams::g0, &PhysicalParams::g0);
  else if (key == "kappa_prime")
    both(&EffectiveParams::kappa_prime, &PhysicalParams::kappa_prime);
  else if (key == "n_th")
    both(&EffectiveParams::n_th, &PhysicalParams::n_th);
  else if (key == "n_ph")
    both(&EffectiveParams::n_ph, &PhysicalParams::n_ph);
  else if (key == "omega_min")
    c.grid.omega_min = ParseDouble(key, value);
  else if (key == "omega_max")
    c.grid.omega_max = ParseDouble(key, value);
  else if (key == "step")
    c.grid.step = ParseDouble(key, value);
  else if (key == "j_set")
    c.j_set = ParseJSet(value);
  else if (key == "nonlinear")
    c.nonlinear = ParseSwitch(key, value);
  else if (key == "moment_convention")
    c.convention = ParseMomentConvention(value);
  else if (key == "output")
    c.output = value;
  else if (key == "plot")
    c.plot = value;
  else if (key == "green_output")
    c.green_output = value;
  else if (key == "report")
    c.report = value;
  else if (key == "verbose")
    c.verbose = ParseSwitch(key, value);
  else if (key == "refine_levels")
    c.refine_levels = ParseInt(key, value);
  else if (key == "refine_half_width")
    c.refine_half_width = ParseDouble(key, value);
  else if (key == "refine_factor")
    c.refine_factor = ParseInt(key, value);
  else if (key == "zeta_re")
    c.zeta.real(ParseDouble(key, value));
  else if (key == "zeta_im")
    c.zeta.imag(ParseDouble(key, value));
  else if (key == "oracle")
  {
    if (ParseSwitch(key, value))
      EnsureOracle(c);
    else
      c.oracle.reset();
  }
  else if (key == "n_a")
    EnsureOracle(c).fock.n_a = ParseInt(key, value);
  else if (key == "n_b")
    EnsureOracle(c).fock.n_b = ParseInt(key, value);
  else if (key == "tau_max")
    EnsureOracle(c).fock.tau_max = ParseDouble(key, value);
  else if (key == "dt")
    EnsureOracle(c).fock.dt = ParseDouble(key, value);
  else if (key == "scan")
    EnsureOracle(c).scan = ParseScan(value);
  else if (key == "flat_fraction")
    EnsureOracle(c).window.flat_fraction = ParseDouble(key, value);
  else if (key == "decay_fraction")
    EnsureOracle(c).window.decay_fraction = ParseDouble(key, value);
  else if (key == "max_peak_bias")
    EnsureOracle(c).max_peak_bias = ParseDouble(key, value);
  else
    throw InvalidParameter(fmt::format("unknown configuration key '{}'", key));
}

// gamma, kappa' and n_th shared by every preset.
RunConfig PresetBase()
{
  RunConfig c;
  for (auto [k, v] : {std::pair{"kappa", "1"}, {"gamma", "1e-4"}, {"kappa_prime", "0.25"},
                      {"n_th", "1"}, {"n_ph", "0"}})
  {
    ApplyPair(c, k, v);
  }
  return c;
}

}  // namespace

void RunConfig::Validate() const
{
  if (mode == InputMode::Effective)
  {
    if (!physical_keys.empty())
    {
      throw InvalidParameter(
          fmt::format("effective mode forbids '{}'; set mode = physical", physical_keys.front()));
    }
    effective.Validate();
  }
  else
  {
    physical.Validate();
  }
  grid.Validate();
  if (j_set.empty())
  {
    throw InvalidParameter("j_set is empty");
  }
  if (refine_levels < 0 || refine_factor < 2 || !(refine_half_width > 0.0))
  {
    throw InvalidParameter("refinement needs levels >= 0, factor >= 2, half width > 0");
  }
  if (oracle)
  {
    oracle->fock.Validate();
    for (auto [na, nb] : oracle->scan)
    {
      FockConfig f = oracle->fock;
      f.n_a = na;
      f.n_b = nb;
      f.Validate();
    }
    const auto &w = oracle->window;
    if (!(w.flat_fraction > 0.0 && w.flat_fraction <= 1.0) || !(w.decay_fraction > 0.0))
    {
      throw InvalidParameter("window needs 0 < flat_fraction <= 1 and decay_fraction > 0");
    }
  }
}

std::vector<std::string> PresetNames() { return {"fig1a", "fig1b", "fig2", "fig3", "fig4"}; }

RunConfig PresetConfig(std::string_view name)
{
  RunConfig c = PresetBase();
  KeyValues kv;
  if (name == "fig1a" || name == "fig1b")
  {
    kv = {{"delta", "50"}, {"omega_m", "50"}, {"g0", "1"},
          {"g", name == "fig1a" ? "5" : "15"}, {"omega_min", "20"}, {"omega_max", "80"},
          {"step", "0.01"}, {"refine_levels", "3"}};
  }
  else if (name == "fig2")
  {
    kv = {{"delta", "10"}, {"omega_m", "10"}, {"g0", "0.2"}, {"g", "0.2"},
          {"omega_min", "0"}, {"omega_max", "20"}, {"step", "0.01"}};
  }
  else if (name == "fig3" || name == "fig4")
  {
    kv = {{"delta", "18"}, {"omega_m", "10"}, {"g0", "0.5"}, {"g", "2.2"},
          {"omega_min", "0"}, {"omega_max", "30"}, {"step", "0.01"}, {"refine_levels", "3"}};
    if (name == "fig4")
    {
      // same parameters, band around both peaks, master-equation comparison
      kv.insert(kv.end(), {{"omega_min", "5"}, {"omega_max", "25"}, {"refine_levels", "0"},
                           {"oracle", "on"}, {"n_a", "8"}, {"n_b", "8"},
                           {"scan", "4x4,5x5,6x6,7x7,8x8"}});
    }
  }
  else
  {
    throw InvalidParameter(fmt::format("unknown preset '{}'", name));
  }
  for (const auto &[k, v] : kv)
  {
    ApplyPair(c, k, v);
  }
  c.preset = std::string(name);
  return c;
}

KeyValues ParseKeyValues(std::string_view text)
{
  KeyValues kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line))
  {
    lineno++;
    if (const auto hash = line.find('#'); hash != std::string::npos)
    {
      line.erase(hash);
    }
    const std::string t = Trim(line);
    if (t.empty())
    {
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
    {
      throw InvalidParameter(fmt::format("line {}: expected key = value", lineno));
    }
    std::string key = Trim(std::string_view(t).substr(0, eq));
    std::string value = Trim(std::string_view(t).substr(eq + 1));
    if (key.empty() || value.empty())
    {
      throw InvalidParameter(fmt::format("line {}: empty key or value", lineno));
    }
    kv.emplace_back(std::move(key), std::move(value));
  }
  return kv;
}

RunConfig BuildConfig(const KeyValues &pairs)
{
  RunConfig c;
  for (const auto &[k, v] : pairs)
  {
    if (k == "preset")
    {
      c = PresetConfig(v);
    }
  }
  for (const auto &[k, v] : pairs)
  {
    if (k != "preset")
    {
      ApplyPair(c, k, v);
    }
  }
  c.Validate();
  return c;
}

RunConfig LoadConfigFile(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw InvalidParameter(fmt::format("cannot read configuration '{}'", path));
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return BuildConfig(ParseKeyValues(ss.str()));
}

EffectiveParams ResolveEffective(const RunConfig &config)
{
  if (config.mode == InputMode::Effective)
  {
    return config.effective;
  }
  return SolveMeanFields(config.physical).effective;
}

std::string EchoParameters(const RunConfig &config)
{
  std::string out;
  auto line = [&out](std::string_view k, double v) { out += fmt::format("{} = {}\n", k, v); };
  if (!config.preset.empty())
  {
    out += fmt::format("preset = {}\n", config.preset);
  }
  if (config.mode == InputMode::Effective)
  {
    const auto &e = config.effective;
    out += "mode = effective\n";
    line("delta", e.delta);
    line("omega_m", e.omega_m);
    line("kappa", e.kappa);
    line("gamma", e.gamma);
    line("g0", e.g0);
    line("g", e.g);
    line("kappa_prime", e.kappa_prime);
    line("n_th", e.n_th);
    line("n_ph", e.n_ph);
  }
  else
  {
    const auto &p = config.physical;
    out += "mode = physical\n";
    line("delta_c", p.delta_c);
    line("eta_mag", p.eta_mag);
    line("omega_m", p.omega_m);
    line("kappa", p.kappa);
    line("gamma", p.gamma);
    line("g0", p.g0);
    line("kappa_prime", p.kappa_prime);
    line("n_th", p.n_th);
    line("n_ph", p.n_ph);
  }
  out += fmt::format("nonlinear = {}\nmoment_convention = {}\n", config.nonlinear ? "on" : "off",
                     ToString(config.convention));
  return out;
}

std::vector<double> SweepGrid(const RunConfig &config, const EffectiveParams &e)
{
  std::vector<double> pts = config.grid.Points();
  if (config.refine_levels == 0)
  {
    return pts;
  }
  std::vector<double> centers;
  try
  {
    const NormalModes nm = NormalFrequencies(e.delta, e.omega_m, e.g);
    centers = {nm.omega_minus, nm.omega_plus};
  }
  catch (const ImaginaryMode &)
  {
    centers = {e.delta, e.omega_m};
  }
  return RefineAround(pts, config.grid.step, centers, config.refine_half_width,
                      config.refine_levels, config.refine_factor);
}

}  // namespace optoresponse
