#include "crosstune/model_update.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "crosstune/log.hpp"
#include "crosstune/rng.hpp"

namespace crosstune {

AdapterModel AdapterModel::init(int d, int m, std::uint64_t seed, int d_prime) {
  if (d_prime < 0) d_prime = d;
  AdapterModel model;
  model.A = Mat::Identity(d_prime, d);
  model.W.resize(m, d_prime);
  model.b.resize(m);
  Rng rng(Rng::derive(seed, 0x6d6f64656cULL));
  for (Eigen::Index r = 0; r < model.W.rows(); ++r)
    for (Eigen::Index c = 0; c < model.W.cols(); ++c)
      model.W(r, c) = rng.uniform(-0.05, 0.05);
  for (Eigen::Index r = 0; r < model.b.size(); ++r)
    model.b[r] = rng.uniform(-0.05, 0.05);
  return model;
}

void TrainConfig::validate() const {
  if (epochs < 0) throw std::invalid_argument("train.epochs must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("train.batch_size must be >= 1");
  if (!(learning_rate > 0.0))
    throw std::invalid_argument("train.learning_rate must be > 0");
  if (!(val_fraction > 0.0 && val_fraction < 1.0))
    throw std::invalid_argument("train.val_fraction must be in (0,1)");
  if (lambda_stoc < 0.0)
    throw std::invalid_argument("train.lambda_stoc must be >= 0");
}

namespace {

std::vector<int> all_rows(Eigen::Index n) {
  std::vector<int> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

struct BatchView {
  Mat raw;   // B x d
  Mat soft;  // B x m (zero rows impossible: callers pass voted samples)
};

BatchView gather(const Mat& raw_features, const std::vector<SoftLabel>& soft,
                 const std::vector<int>& rows) {
  BatchView view;
  const Eigen::Index b = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index m = soft.empty() ? 0 : soft.front().probs.size();
  view.raw.resize(b, raw_features.cols());
  view.soft.resize(b, m);
  for (Eigen::Index i = 0; i < b; ++i) {
    const int r = rows[static_cast<std::size_t>(i)];
    view.raw.row(i) = raw_features.row(r);
    view.soft.row(i) = soft[static_cast<std::size_t>(r)].probs.transpose();
  }
  return view;
}

struct Forward {
  Mat adapted;   // B x d', normalized rows
  Vec norms;     // B, pre-normalization row norms
  Mat logits;    // B x m
  Mat probs;     // B x m
  Mat centers;   // m x d' (zero rows where mass is zero)
  Vec mass;      // m
  LossParts parts;
};

Forward forward_pass(const BatchView& batch, const AdapterModel& model,
                     double lambda_stoc) {
  Forward f;
  const Eigen::Index b = batch.raw.rows();
  const Eigen::Index m = model.W.rows();

  Mat v = batch.raw * model.A.transpose();  // B x d'
  f.norms = v.rowwise().norm();
  for (Eigen::Index i = 0; i < b; ++i) {
    if (f.norms[i] <= 0.0)
      throw std::runtime_error("transform: zero feature vector after adapter");
  }
  f.adapted = v.array().colwise() / f.norms.array();

  f.logits = (f.adapted * model.W.transpose()).rowwise() + model.b.transpose();
  f.probs.resize(b, m);
  for (Eigen::Index i = 0; i < b; ++i) {
    const double row_max = f.logits.row(i).maxCoeff();
    const Eigen::ArrayXd shifted = f.logits.row(i).array() - row_max;
    const Eigen::ArrayXd ex = shifted.exp();
    const double denom = ex.sum();
    f.probs.row(i) = (ex / denom).matrix();
    const double log_denom = std::log(denom) + row_max;
    for (Eigen::Index k = 0; k < m; ++k) {
      const double y = batch.soft(i, k);
      if (y > 0.0) f.parts.softmax_ce += y * (log_denom - f.logits(i, k));
    }
  }

  f.mass = batch.soft.colwise().sum().transpose();
  f.centers = Mat::Zero(m, f.adapted.cols());
  for (Eigen::Index k = 0; k < m; ++k) {
    if (f.mass[k] > 0.0)
      f.centers.row(k) = (batch.soft.col(k).transpose() * f.adapted) / f.mass[k];
  }
  for (Eigen::Index i = 0; i < b; ++i) {
    for (Eigen::Index k = 0; k < m; ++k) {
      const double y = batch.soft(i, k);
      if (y > 0.0 && f.mass[k] > 0.0)
        f.parts.stoc_center += y * (f.adapted.row(i) - f.centers.row(k)).squaredNorm();
    }
  }

  f.parts.total = f.parts.softmax_ce + lambda_stoc * f.parts.stoc_center;
  return f;
}

Gradients backward_pass(const BatchView& batch, const AdapterModel& model,
                        const Forward& f, double lambda_stoc) {
  const Eigen::Index b = batch.raw.rows();

  // d(softmax CE)/d(logits) = p_i * sum_k(y_ik) - y_i
  Mat g_logits = f.probs;
  for (Eigen::Index i = 0; i < b; ++i)
    g_logits.row(i) = f.probs.row(i) * batch.soft.row(i).sum() - batch.soft.row(i);

  Gradients g;
  g.W = g_logits.transpose() * f.adapted;
  g.b = g_logits.colwise().sum().transpose();

  Mat g_adapted = g_logits * model.W;
  // Stochastic center term: 2 y_ik (z_i - o_k). The centers are the
  // weighted means, so dL/d(o_k) vanishes and no extra term appears.
  if (lambda_stoc > 0.0) {
    const Vec row_mass = batch.soft.rowwise().sum();
    g_adapted += 2.0 * lambda_stoc *
                 (f.adapted.array().colwise() * row_mass.array()).matrix();
    g_adapted -= 2.0 * lambda_stoc * (batch.soft * f.centers);
  }

  // Through the row normalization: dL/dv = (g - (g.z) z) / |v|
  Mat g_v(b, f.adapted.cols());
  for (Eigen::Index i = 0; i < b; ++i) {
    const double radial = g_adapted.row(i).dot(f.adapted.row(i));
    g_v.row(i) = (g_adapted.row(i) - radial * f.adapted.row(i)) / f.norms[i];
  }
  g.A = g_v.transpose() * batch.raw;
  return g;
}

}  // namespace

std::vector<std::optional<Vec>> stochastic_centers(
    const Mat& adapted, const std::vector<SoftLabel>& soft) {
  if (adapted.rows() != static_cast<Eigen::Index>(soft.size()))
    throw std::invalid_argument("stochastic_centers: features/labels misaligned");
  const Eigen::Index m = soft.empty() ? 0 : soft.front().probs.size();
  std::vector<std::optional<Vec>> centers(static_cast<std::size_t>(m));
  Vec mass = Vec::Zero(m);
  Mat acc = Mat::Zero(m, adapted.cols());
  for (std::size_t i = 0; i < soft.size(); ++i) {
    const Vec& y = soft[i].probs;
    for (Eigen::Index k = 0; k < m; ++k) {
      if (y[k] > 0.0) {
        mass[k] += y[k];
        acc.row(k) += y[k] * adapted.row(static_cast<Eigen::Index>(i));
      }
    }
  }
  for (Eigen::Index k = 0; k < m; ++k)
    if (mass[k] > 0.0) centers[static_cast<std::size_t>(k)] = (acc.row(k) / mass[k]).transpose();
  return centers;
}

LossParts loss(const Mat& raw_features, const std::vector<SoftLabel>& soft,
               const AdapterModel& model, double lambda_stoc,
               const std::vector<int>& rows) {
  const std::vector<int> use = rows.empty() ? all_rows(raw_features.rows()) : rows;
  const BatchView batch = gather(raw_features, soft, use);
  return forward_pass(batch, model, lambda_stoc).parts;
}

Gradients gradients(const Mat& raw_features, const std::vector<SoftLabel>& soft,
                    const AdapterModel& model, double lambda_stoc,
                    const std::vector<int>& rows) {
  const std::vector<int> use = rows.empty() ? all_rows(raw_features.rows()) : rows;
  const BatchView batch = gather(raw_features, soft, use);
  const Forward f = forward_pass(batch, model, lambda_stoc);
  return backward_pass(batch, model, f, lambda_stoc);
}

AdapterModel train_adapter(const Mat& raw_features,
                           const std::vector<SoftLabel>& soft,
                           const std::vector<int>& rows,
                           const AdapterModel& start, const TrainConfig& cfg,
                           TrainHistory* history) {
  cfg.validate();

  // Stratified split by argmax label.
  std::map<int, std::vector<int>> by_class;
  for (int r : rows) {
    const SoftLabel& label = soft[static_cast<std::size_t>(r)];
    if (label.vote_count == 0)
      throw std::invalid_argument("train_adapter: zero-vote sample in training rows");
    int best = 0;
    for (Eigen::Index k = 1; k < label.probs.size(); ++k)
      if (label.probs[k] > label.probs[best]) best = static_cast<int>(k);
    by_class[best].push_back(r);
  }
  if (by_class.size() < 2)
    throw std::runtime_error("train_adapter: need at least 2 distinct argmax classes, have " +
                             std::to_string(by_class.size()));

  Rng rng(Rng::derive(cfg.seed, 0x747261696eULL));
  std::vector<int> train_rows, val_rows;
  for (auto& [label, members] : by_class) {
    (void)label;
    rng.shuffle(members);
    std::size_t val_count = static_cast<std::size_t>(
        std::floor(cfg.val_fraction * static_cast<double>(members.size())));
    if (val_count >= members.size()) val_count = members.size() - 1;
    for (std::size_t i = 0; i < members.size(); ++i)
      (i < val_count ? val_rows : train_rows).push_back(members[i]);
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(val_rows.begin(), val_rows.end());

  AdapterModel model = start;
  auto val_loss = [&](const AdapterModel& mdl) {
    if (val_rows.empty()) return 0.0;
    return loss(raw_features, soft, mdl, cfg.lambda_stoc, val_rows).total;
  };

  TrainHistory local;
  local.initial_val_loss = val_loss(model);
  local.best_val_loss = local.initial_val_loss;
  local.best_epoch = 0;
  AdapterModel best = model;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(train_rows);
    double train_total = 0.0;
    LossParts last_parts;
    for (std::size_t begin = 0; begin < train_rows.size();
         begin += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(train_rows.size(), begin + static_cast<std::size_t>(cfg.batch_size));
      const std::vector<int> batch_rows(train_rows.begin() + static_cast<std::ptrdiff_t>(begin),
                                        train_rows.begin() + static_cast<std::ptrdiff_t>(end));
      const BatchView batch = gather(raw_features, soft, batch_rows);
      const Forward f = forward_pass(batch, model, cfg.lambda_stoc);
      const Gradients g = backward_pass(batch, model, f, cfg.lambda_stoc);
      const double scale = cfg.learning_rate / static_cast<double>(batch_rows.size());
      model.A -= scale * g.A;
      model.W -= scale * g.W;
      model.b -= scale * g.b;
      train_total += f.parts.total;
      last_parts = f.parts;
    }
    const double v = val_loss(model);
    local.epochs.push_back(EpochStats{train_total, v});
    local.final_train_parts = last_parts;
    if (v < local.best_val_loss) {
      local.best_val_loss = v;
      local.best_epoch = epoch;
      best = model;
    }
  }

  best.trained = cfg.epochs > 0 || start.trained;
  if (history) *history = std::move(local);
  return best;
}

Mat transform(const Mat& raw_features, const AdapterModel& model) {
  if (raw_features.cols() != model.A.cols())
    throw std::invalid_argument("transform: feature dimension does not match adapter");
  Mat v = raw_features * model.A.transpose();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    const double norm = v.row(i).norm();
    if (norm <= 0.0)
      throw std::runtime_error("transform: zero feature vector at row " + std::to_string(i));
    v.row(i) /= norm;
  }
  return v;
}

}  // namespace crosstune
