#include "glbai/environment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace glbai {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_double(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) return std::nullopt;
  return v;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  // A UTF-8 byte order mark is tolerated.
  if (!lines.empty() && lines.front().rfind("\xEF\xBB\xBF", 0) == 0) lines.front().erase(0, 3);
  return lines;
}

double cell_value(std::string_view cell, const std::filesystem::path& path, std::size_t line_no) {
  const auto v = parse_double(cell);
  if (!v || !std::isfinite(*v))
    throw ParseError(path.string() + ":" + std::to_string(line_no) + ": non-numeric cell '" +
                         std::string(cell) + "'",
                     line_no);
  return *v;
}

}  // namespace

BanditInstance make_instance(MatrixXd features, std::optional<VectorXd> theta, LinkKind link,
                             const InstanceOptions& options) {
  if (features.rows() < 2) throw InvalidArgument("an instance needs at least two arms");
  if (features.cols() < 1) throw InvalidArgument("an instance needs at least one feature");
  if (!features.allFinite()) throw InvalidArgument("features contain non-finite values");
  if (theta && theta->size() != features.cols())
    throw DimensionMismatch("theta has dimension " + std::to_string(theta->size()) + ", features have " +
                            std::to_string(features.cols()));
  if (options.noise_sigma < 0) throw InvalidArgument("noise_sigma must be non-negative");

  BanditInstance inst;
  inst.link = link;
  inst.features = std::move(features);
  inst.theta = std::move(theta);
  inst.noise_sigma = options.noise_sigma;
  for (Index a = 0; a < inst.num_arms(); ++a) inst.arm_ids.push_back(std::to_string(a));

  double max_abs_mean = 0;
  if (inst.theta) {
    const VectorXd z = inst.features * *inst.theta;
    inst.means.resize(inst.num_arms());
    for (Index a = 0; a < inst.num_arms(); ++a) inst.means(a) = mu_eval(link, z(a));
    max_abs_mean = inst.means.cwiseAbs().maxCoeff();
  }
  switch (link) {
    case LinkKind::Logistic:
      inst.reward_bound = options.reward_bound.value_or(1.0);
      break;
    case LinkKind::Identity:
      inst.reward_bound = options.reward_bound.value_or(max_abs_mean + options.noise_sigma);
      break;
    case LinkKind::Poisson:
      inst.reward_bound = options.reward_bound.value_or(max_abs_mean + 6.0 * std::sqrt(max_abs_mean) + 6.0);
      break;
  }
  if (!(inst.reward_bound > 0)) inst.reward_bound = 1.0;
  return inst;
}

BanditInstance sample_instance(Index num_arms, Index dim, LinkKind link, Rng& rng,
                               const InstanceOptions& options) {
  if (num_arms < 2) throw InvalidArgument("K must be at least 2");
  if (dim < 1) throw InvalidArgument("d must be at least 1");
  VectorXd theta(dim);
  for (Index i = 0; i < dim; ++i) theta(i) = rng.normal();
  MatrixXd features(num_arms, dim);
  for (Index a = 0; a < num_arms; ++a)
    for (Index i = 0; i < dim; ++i) features(a, i) = rng.uniform(-1.0, 1.0);
  return make_instance(std::move(features), std::move(theta), link, options);
}

RewardDraw pull_arm(const BanditInstance& instance, Index arm, Rng& rng) {
  if (arm < 0 || arm >= instance.num_arms())
    throw InvalidArgument("arm index " + std::to_string(arm) + " out of range");
  if (!instance.has_ground_truth()) throw InvalidArgument("instance has no hidden parameter to simulate rewards");
  const double mean = instance.means(arm);
  switch (instance.link) {
    case LinkKind::Logistic:
      return {rng.bernoulli(mean) ? 1.0 : 0.0, false};
    case LinkKind::Poisson: {
      const double r = static_cast<double>(rng.poisson(mean));
      if (r > instance.reward_bound) return {instance.reward_bound, true};
      return {r, false};
    }
    case LinkKind::Identity: {
      const double r = mean + rng.uniform(-instance.noise_sigma, instance.noise_sigma);
      const double clipped = std::clamp(r, -instance.reward_bound, instance.reward_bound);
      return {clipped, clipped != r};
    }
  }
  return {mean, false};
}

InstanceStats instance_stats(const VectorXd& means) {
  const Index k = means.size();
  if (k < 2) throw InvalidArgument("instance_stats needs at least two arms");
  InstanceStats st;
  st.best_arm = 0;
  for (Index a = 1; a < k; ++a)
    if (means(a) > means(st.best_arm)) st.best_arm = a;
  double second = -std::numeric_limits<double>::infinity();
  for (Index a = 0; a < k; ++a)
    if (a != st.best_arm) second = std::max(second, means(a));
  st.optimal_gaps.resize(k);
  for (Index a = 0; a < k; ++a)
    st.optimal_gaps(a) = a == st.best_arm ? means(a) - second : means(st.best_arm) - means(a);
  st.delta_min = st.optimal_gaps.minCoeff();
  return st;
}

InstanceStats instance_stats(const BanditInstance& instance) {
  if (!instance.has_ground_truth()) throw InvalidArgument("instance has no ground truth");
  return instance_stats(instance.means);
}

BanditInstance load_instance_csv(const std::filesystem::path& features_path,
                                 const std::optional<std::filesystem::path>& theta_path, LinkKind link,
                                 const InstanceOptions& options) {
  const auto lines = read_lines(features_path);
  if (lines.empty()) throw ParseError(features_path.string() + ": empty file", 1);
  const auto header = split_commas(lines.front());
  if (header.size() < 2)
    throw ParseError(features_path.string() + ":1: header must be arm_id,f1,...,fd", 1);
  const std::size_t d = header.size() - 1;

  std::vector<std::string> ids;
  std::vector<double> values;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const std::size_t line_no = n + 1;
    if (trim(lines[n]).empty()) continue;
    const auto cells = split_commas(lines[n]);
    if (cells.size() != d + 1)
      throw ParseError(features_path.string() + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(d + 1) + " cells, found " + std::to_string(cells.size()),
                       line_no);
    ids.emplace_back(cells[0]);
    for (std::size_t c = 1; c <= d; ++c) values.push_back(cell_value(cells[c], features_path, line_no));
  }
  if (ids.size() < 2) throw ParseError(features_path.string() + ": fewer than two arms", lines.size());
  MatrixXd features = Eigen::Map<const MatrixXd>(values.data(), static_cast<Index>(ids.size()),
                                                 static_cast<Index>(d));

  std::optional<VectorXd> theta;
  if (theta_path) {
    const auto tlines = read_lines(*theta_path);
    std::vector<std::vector<std::string_view>> rows;
    std::vector<std::size_t> row_lines;
    for (std::size_t n = 0; n < tlines.size(); ++n) {
      if (trim(tlines[n]).empty()) continue;
      rows.push_back(split_commas(tlines[n]));
      row_lines.push_back(n + 1);
    }
    if (rows.empty()) throw ParseError(theta_path->string() + ": empty file", 1);
    std::size_t pick = 0;
    if (!parse_double(rows[0][0])) pick = 1;  // header row
    if (pick >= rows.size()) throw ParseError(theta_path->string() + ": no parameter row", row_lines.back());
    if (rows.size() > pick + 1)
      throw ParseError(theta_path->string() + ": expected a single parameter row", row_lines[pick + 1]);
    const auto& cells = rows[pick];
    if (cells.size() != d)
      throw ParseError(theta_path->string() + ":" + std::to_string(row_lines[pick]) + ": theta has " +
                           std::to_string(cells.size()) + " entries, features have d = " + std::to_string(d),
                       row_lines[pick]);
    VectorXd t(static_cast<Index>(d));
    for (std::size_t c = 0; c < d; ++c) t(static_cast<Index>(c)) = cell_value(cells[c], *theta_path, row_lines[pick]);
    theta = std::move(t);
  }

  auto inst = make_instance(std::move(features), std::move(theta), link, options);
  inst.arm_ids = std::move(ids);
  return inst;
}

namespace {
std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}
}  // namespace

void write_instance_csv(const BanditInstance& instance, const std::filesystem::path& features_path,
                        const std::optional<std::filesystem::path>& theta_path) {
  std::ofstream out(features_path);
  if (!out) throw Error("cannot write " + features_path.string());
  out << "arm_id";
  for (Index i = 0; i < instance.dim(); ++i) out << ",f" << (i + 1);
  out << '\n';
  for (Index a = 0; a < instance.num_arms(); ++a) {
    out << (a < static_cast<Index>(instance.arm_ids.size()) ? instance.arm_ids[a] : std::to_string(a));
    for (Index i = 0; i < instance.dim(); ++i) out << ',' << format_double(instance.features(a, i));
    out << '\n';
  }
  if (theta_path) {
    if (!instance.theta) throw InvalidArgument("instance has no theta to write");
    std::ofstream tout(*theta_path);
    if (!tout) throw Error("cannot write " + theta_path->string());
    for (Index i = 0; i < instance.dim(); ++i) tout << (i ? "," : "") << 'f' << (i + 1);
    tout << '\n';
    for (Index i = 0; i < instance.dim(); ++i) tout << (i ? "," : "") << format_double((*instance.theta)(i));
    tout << '\n';
  }
}

}  // namespace glbai
