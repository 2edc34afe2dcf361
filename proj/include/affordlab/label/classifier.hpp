#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "affordlab/common/random.hpp"
#include "affordlab/learn/mlp.hpp"

namespace affordlab::label {

enum class Label { kPress = 0, kSlide = 1 };

std::string_view to_string(Label label);
Label label_from_string(std::string_view name);

struct AffordanceDistribution {
  double p_press = 0.5;
  double p_slide = 0.5;

  Label argmax() const { return p_press >= p_slide ? Label::kPress : Label::kSlide; }
};

// Softmax over (press, slide) logits.
AffordanceDistribution softmax(double press_logit, double slide_logit);

struct LabeledMotion {
  Eigen::VectorXd features;
  Label label = Label::kPress;
  std::uint64_t episode_id = 0;
};

struct ClassifierConfig {
  int hidden = 32;
  double learning_rate = 1e-3;
  int minibatch = 64;
  int max_epochs = 300;
  int patience = 30;  // epochs without validation improvement before stopping
  double train_fraction = 0.8;
  double val_fraction = 0.1;

  void validate() const;
};

// Feature standardization + features -> hidden -> 2 logits.
struct ClassifierParams {
  learn::Mlp net;
  Eigen::VectorXd feature_mean;
  Eigen::VectorXd feature_std;

  int feature_size() const { return static_cast<int>(feature_mean.size()); }
};

// rows: true label, columns: predicted label (press, slide)
using ConfusionMatrix = std::array<std::array<int, 2>, 2>;

struct ClassifierReport {
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
  double test_accuracy = 0.0;
  ConfusionMatrix test_confusion{};
  int best_epoch = 0;
  int epochs_run = 0;
  std::size_t train_size = 0;
  std::size_t val_size = 0;
  std::size_t test_size = 0;

  double recall(Label label) const;
};

struct TrainedClassifier {
  ClassifierParams params;
  ClassifierReport report;
};

// Shuffles with `rng`, splits train/val/test and trains with Adam on the
// cross-entropy loss. The parameters with the best validation accuracy are
// kept. Throws std::invalid_argument when fewer than 100 samples are given,
// when only one class is present, or when feature sizes disagree.
TrainedClassifier train_classifier(const std::vector<LabeledMotion>& data,
                                   const ClassifierConfig& cfg, Rng& rng);

// Throws std::invalid_argument on a feature dimension mismatch.
AffordanceDistribution classify(const ClassifierParams& params, const Eigen::VectorXd& features);

double accuracy(const ClassifierParams& params, const std::vector<LabeledMotion>& data,
                ConfusionMatrix* confusion = nullptr);

nlohmann::json classifier_to_json(const ClassifierParams& params, const ClassifierReport& report);
ClassifierParams classifier_from_json(const nlohmann::json& j);
void save_classifier(const std::filesystem::path& path, const TrainedClassifier& trained,
                     const nlohmann::json& extra = nlohmann::json::object());
ClassifierParams load_classifier(const std::filesystem::path& path);

}  // namespace affordlab::label
