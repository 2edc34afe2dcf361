#include "affordlab/label/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "affordlab/learn/adam.hpp"

namespace affordlab::label {

using nlohmann::json;

std::string_view to_string(Label label) { return label == Label::kPress ? "press" : "slide"; }

Label label_from_string(std::string_view name) {
  if (name == "press") return Label::kPress;
  if (name == "slide") return Label::kSlide;
  throw std::invalid_argument("unknown label '" + std::string(name) + "'");
}

AffordanceDistribution softmax(double press_logit, double slide_logit) {
  const double m = std::max(press_logit, slide_logit);
  const double ep = std::exp(press_logit - m);
  const double es = std::exp(slide_logit - m);
  AffordanceDistribution d;
  d.p_press = ep / (ep + es);
  d.p_slide = 1.0 - d.p_press;
  return d;
}

void ClassifierConfig::validate() const {
  if (hidden <= 0) throw std::invalid_argument("classifier hidden size must be positive");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("classifier learning_rate must be > 0");
  if (minibatch <= 0) throw std::invalid_argument("classifier minibatch must be positive");
  if (max_epochs <= 0) throw std::invalid_argument("classifier max_epochs must be positive");
  if (patience <= 0) throw std::invalid_argument("classifier patience must be positive");
  if (!(train_fraction > 0.0) || !(val_fraction > 0.0) || train_fraction + val_fraction >= 1.0) {
    throw std::invalid_argument("classifier split fractions must leave room for a test set");
  }
}

double ClassifierReport::recall(Label label) const {
  const auto& row = test_confusion[static_cast<int>(label)];
  const int total = row[0] + row[1];
  return total > 0 ? static_cast<double>(row[static_cast<int>(label)]) / total : 0.0;
}

namespace {

Eigen::MatrixXd standardized_matrix(const ClassifierParams& p,
                                    const std::vector<const LabeledMotion*>& rows) {
  Eigen::MatrixXd x(p.feature_size(), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    x.col(static_cast<Eigen::Index>(i)) =
        (rows[i]->features - p.feature_mean).cwiseQuotient(p.feature_std);
  }
  return x;
}

double subset_accuracy(const ClassifierParams& p, const std::vector<const LabeledMotion*>& rows,
                       ConfusionMatrix* confusion) {
  if (confusion) *confusion = ConfusionMatrix{};
  if (rows.empty()) return 0.0;
  const Eigen::MatrixXd logits = p.net.forward(standardized_matrix(p, rows));
  int correct = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    const Label predicted = logits(0, c) >= logits(1, c) ? Label::kPress : Label::kSlide;
    if (predicted == rows[i]->label) ++correct;
    if (confusion) {
      ++(*confusion)[static_cast<int>(rows[i]->label)][static_cast<int>(predicted)];
    }
  }
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

}  // namespace

TrainedClassifier train_classifier(const std::vector<LabeledMotion>& data,
                                   const ClassifierConfig& cfg, Rng& rng) {
  cfg.validate();
  if (data.size() < 100) {
    throw std::invalid_argument("classifier needs at least 100 samples, got " +
                                std::to_string(data.size()));
  }
  const Eigen::Index dim = data.front().features.size();
  std::array<int, 2> class_count{0, 0};
  for (const auto& m : data) {
    if (m.features.size() != dim) throw std::invalid_argument("inconsistent feature sizes");
    if (!m.features.allFinite()) throw std::invalid_argument("non-finite feature value");
    ++class_count[static_cast<int>(m.label)];
  }
  if (class_count[0] == 0 || class_count[1] == 0) {
    throw std::invalid_argument("single-class data: both press and slide samples are required");
  }

  std::vector<const LabeledMotion*> order;
  order.reserve(data.size());
  for (const auto& m : data) order.push_back(&m);
  shuffle(order, rng);
  const auto n = order.size();
  const auto n_train = static_cast<std::size_t>(std::floor(cfg.train_fraction * n));
  const auto n_val = static_cast<std::size_t>(std::floor(cfg.val_fraction * n));
  const std::vector<const LabeledMotion*> train(order.begin(), order.begin() + n_train);
  const std::vector<const LabeledMotion*> val(order.begin() + n_train,
                                              order.begin() + n_train + n_val);
  const std::vector<const LabeledMotion*> test(order.begin() + n_train + n_val, order.end());

  ClassifierParams p;
  p.feature_mean = Eigen::VectorXd::Zero(dim);
  for (const auto* m : train) p.feature_mean += m->features;
  p.feature_mean /= static_cast<double>(train.size());
  Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
  for (const auto* m : train) var += (m->features - p.feature_mean).cwiseAbs2();
  var /= static_cast<double>(train.size());
  p.feature_std = var.cwiseSqrt().unaryExpr([](double s) { return s > 1e-8 ? s : 1.0; });

  p.net = learn::Mlp({static_cast<int>(dim), cfg.hidden, 2}, learn::Activation::kTanh);
  p.net.init_orthogonal(rng, 1.0, 0.1);
  learn::Adam adam(p.net.num_params(), learn::AdamConfig{cfg.learning_rate, 0.9, 0.999, 1e-8});

  const Eigen::MatrixXd x_train = standardized_matrix(p, train);
  std::vector<Eigen::Index> idx(train.size());
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});

  ClassifierParams best = p;
  double best_val = -1.0;
  TrainedClassifier out;
  const auto mb = static_cast<std::size_t>(cfg.minibatch);
  int since_best = 0;
  int epoch = 0;
  for (; epoch < cfg.max_epochs && since_best < cfg.patience; ++epoch) {
    shuffle(idx, rng);
    for (std::size_t start = 0; start < idx.size(); start += mb) {
      const std::size_t len = std::min(mb, idx.size() - start);
      Eigen::MatrixXd xb(dim, static_cast<Eigen::Index>(len));
      Eigen::MatrixXd target = Eigen::MatrixXd::Zero(2, static_cast<Eigen::Index>(len));
      for (std::size_t k = 0; k < len; ++k) {
        const Eigen::Index i = idx[start + k];
        xb.col(static_cast<Eigen::Index>(k)) = x_train.col(i);
        target(static_cast<int>(train[static_cast<std::size_t>(i)]->label),
               static_cast<Eigen::Index>(k)) = 1.0;
      }
      learn::MlpCache cache;
      const Eigen::MatrixXd logits = p.net.forward(xb, &cache);
      Eigen::MatrixXd probs(2, logits.cols());
      for (Eigen::Index c = 0; c < logits.cols(); ++c) {
        const AffordanceDistribution d = softmax(logits(0, c), logits(1, c));
        probs(0, c) = d.p_press;
        probs(1, c) = d.p_slide;
      }
      const Eigen::MatrixXd grad_logits = (probs - target) / static_cast<double>(len);
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(p.net.num_params());
      p.net.backward(cache, grad_logits, grad);
      adam.step(p.net.params(), grad);
    }
    const double val_acc = subset_accuracy(p, val, nullptr);
    if (val_acc > best_val) {
      best_val = val_acc;
      best = p;
      out.report.best_epoch = epoch + 1;
      since_best = 0;
    } else {
      ++since_best;
    }
  }
  out.params = std::move(best);
  out.report.epochs_run = epoch;
  out.report.train_accuracy = subset_accuracy(out.params, train, nullptr);
  out.report.val_accuracy = best_val;
  out.report.test_accuracy = subset_accuracy(out.params, test, &out.report.test_confusion);
  out.report.train_size = train.size();
  out.report.val_size = val.size();
  out.report.test_size = test.size();
  return out;
}

AffordanceDistribution classify(const ClassifierParams& params, const Eigen::VectorXd& features) {
  if (features.size() != params.feature_size()) {
    throw std::invalid_argument("classify: expected " + std::to_string(params.feature_size()) +
                                " features, got " + std::to_string(features.size()));
  }
  const Eigen::VectorXd z = (features - params.feature_mean).cwiseQuotient(params.feature_std);
  const Eigen::VectorXd logits = params.net.forward_one(z);
  return softmax(logits(0), logits(1));
}

double accuracy(const ClassifierParams& params, const std::vector<LabeledMotion>& data,
                ConfusionMatrix* confusion) {
  std::vector<const LabeledMotion*> rows;
  rows.reserve(data.size());
  for (const auto& m : data) {
    if (m.features.size() != params.feature_size()) {
      throw std::invalid_argument("accuracy: feature dimension mismatch");
    }
    rows.push_back(&m);
  }
  return subset_accuracy(params, rows, confusion);
}

namespace {

json values(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd values_from(const json& j, Eigen::Index expected, const char* what) {
  const auto v = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(v.size()) != expected) {
    throw std::runtime_error(std::string("classifier field '") + what + "' has wrong length");
  }
  return Eigen::Map<const Eigen::VectorXd>(v.data(), expected);
}

}  // namespace

json classifier_to_json(const ClassifierParams& params, const ClassifierReport& report) {
  const auto& cm = report.test_confusion;
  return json{{"schema", "affordlab.classifier"},
              {"version", 1},
              {"labels", {"press", "slide"}},
              {"layers", params.net.layer_sizes()},
              {"activation", std::string(learn::to_string(params.net.hidden_activation()))},
              {"params", values(params.net.params())},
              {"feature_mean", values(params.feature_mean)},
              {"feature_std", values(params.feature_std)},
              {"report",
               {{"train_accuracy", report.train_accuracy},
                {"val_accuracy", report.val_accuracy},
                {"test_accuracy", report.test_accuracy},
                {"test_confusion", {{cm[0][0], cm[0][1]}, {cm[1][0], cm[1][1]}}},
                {"best_epoch", report.best_epoch},
                {"epochs_run", report.epochs_run},
                {"split", {report.train_size, report.val_size, report.test_size}}}}};
}

ClassifierParams classifier_from_json(const json& j) {
  if (j.value("schema", "") != "affordlab.classifier" || j.value("version", 0) != 1) {
    throw std::runtime_error("not a version 1 affordlab classifier");
  }
  ClassifierParams p;
  p.net = learn::Mlp(j.at("layers").get<std::vector<int>>(),
                     learn::activation_from_string(j.at("activation").get<std::string>()));
  if (p.net.output_size() != 2) throw std::runtime_error("classifier must have two outputs");
  p.net.params() = values_from(j.at("params"), p.net.num_params(), "params");
  p.feature_mean = values_from(j.at("feature_mean"), p.net.input_size(), "feature_mean");
  p.feature_std = values_from(j.at("feature_std"), p.net.input_size(), "feature_std");
  return p;
}

void save_classifier(const std::filesystem::path& path, const TrainedClassifier& trained,
                     const json& extra) {
  json j = classifier_to_json(trained.params, trained.report);
  j["meta"] = extra;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write classifier " + path.string());
  out << j.dump(1) << '\n';
  if (!out) throw std::runtime_error("failed writing classifier " + path.string());
}

ClassifierParams load_classifier(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open classifier " + path.string());
  try {
    return classifier_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed classifier " + path.string() + ": " + e.what());
  }
}

}  // namespace affordlab::label
