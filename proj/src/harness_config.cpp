#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "cuspflow/harness.hpp"

namespace cuspflow {
namespace harness {

FitResult rate_fit(const std::vector<std::pair<double, double>>& samples, double t_lo,
                   double t_hi) {
  std::vector<std::pair<double, double>> used;
  for (const auto& [t, value] : samples) {
    if (t < t_lo || t > t_hi) continue;
    if (!(value > 0.0))
      throw std::invalid_argument("rate_fit: nonpositive value inside the window");
    used.emplace_back(std::log(t), std::log(value));
  }
  if (used.size() < 5)
    throw std::invalid_argument("rate_fit: need at least 5 samples inside the window");

  const double n = double(used.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : used) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;

  double ss_res = 0, ss_tot = 0;
  const double mean_y = sy / n;
  for (const auto& [x, y] : used) {
    const double fit_y = intercept + slope * x;
    ss_res += (y - fit_y) * (y - fit_y);
    ss_tot += (y - mean_y) * (y - mean_y);
  }
  FitResult out;
  out.p = -slope;
  out.c = std::exp(intercept);
  out.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
  return out;
}

void ExperimentConfig::validate() const {
  if (experiment != "lemmas" && experiment != "validate" && experiment != "contract")
    throw ConfigError("unknown experiment '" + experiment + "'");
  if (!(c1 > 32.0)) throw ConfigError("c1 must exceed 32");
  const double mid = 2.0 * mu * mu / alpha;
  if (!(1.0 / 32.0 > mid && mid > 1.0 / c1))
    throw ConfigError("constants must satisfy 1/32 > 2 mu^2 / alpha > 1/c1");
  if (!(alpha > 1.0)) throw ConfigError("alpha must exceed 1");
  if (grid_n < 16) throw ConfigError("grid_n must be at least 16");
  for (double r : r_out_list)
    if (!(r > 0.0 && r < 1.0)) throw ConfigError("r_out must lie in (0, 1)");
  for (double r0 : r0_list)
    if (!(r0 > 0.0 && r0 < kInvE)) throw ConfigError("r0 must lie in (0, 1/e)");
  if (format != "csv" && format != "json" && format != "both")
    throw ConfigError("format must be csv, json or both");
  if (t_fit_lo > 0 && t_fit_hi > 0 && !(t_fit_lo < t_fit_hi))
    throw ConfigError("fit window must satisfy t_fit_lo < t_fit_hi");
}

double parse_radius_token(const std::string& token) {
  // "e-30" means exp(-30); anything else must parse as a plain double.
  if (token.size() > 1 && (token[0] == 'e' || token[0] == 'E') &&
      (token[1] == '-' || token[1] == '+' || std::isdigit(static_cast<unsigned char>(token[1])))) {
    char* end = nullptr;
    const double expo = std::strtod(token.c_str() + 1, &end);
    if (end != token.c_str() + token.size()) throw ConfigError("bad radius token '" + token + "'");
    return std::exp(expo);
  }
  char* end = nullptr;
  const double value = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size() || token.empty())
    throw ConfigError("bad numeric token '" + token + "'");
  return value;
}

std::vector<double> parse_list(const std::string& csv, bool radii) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string token;
  while (std::getline(ss, token, ',')) {
    token.erase(std::remove_if(token.begin(), token.end(),
                               [](unsigned char c) { return std::isspace(c); }),
                token.end());
    if (token.empty()) continue;
    out.push_back(radii ? parse_radius_token(token) : std::strtod(token.c_str(), nullptr));
  }
  return out;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  ExperimentConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r\n");
      const auto b = s.find_last_not_of(" \t\r\n");
      return (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "experiment") cfg.experiment = value;
    else if (key == "r0") cfg.r0_list = parse_list(value, true);
    else if (key == "grid_n") cfg.grid_n = std::stoi(value);
    else if (key == "r_out") cfg.r_out_list = parse_list(value, false);
    else if (key == "t_samples") cfg.t_samples = parse_list(value, false);
    else if (key == "t_fit_lo") cfg.t_fit_lo = std::stod(value);
    else if (key == "t_fit_hi") cfg.t_fit_hi = std::stod(value);
    else if (key == "alpha") cfg.alpha = std::stod(value);
    else if (key == "mu") cfg.mu = std::stod(value);
    else if (key == "c1") cfg.c1 = std::stod(value);
    else if (key == "seed") cfg.seed = unsigned(std::stoul(value));
    else if (key == "threads") cfg.threads = std::stoi(value);
    else if (key == "out") cfg.out_dir = value;
    else if (key == "format") cfg.format = value;
    else throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  return cfg;
}

int resolve_threads(int configured) {
  if (configured > 0) return configured;
  if (const char* env = std::getenv("CUSPFLOW_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? int(hw) : 1;
}

void parallel_for(int n, int max_threads, const std::function<void(int)>& task) {
  const int workers = std::max(1, std::min(n, max_threads));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace harness
}  // namespace cuspflow
