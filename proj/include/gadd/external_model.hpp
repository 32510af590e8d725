#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gadd/config.hpp"
#include "gadd/model.hpp"

namespace gadd {

/// One child process speaking the line protocol: N space-separated %.17g floats in, one float out.
class ModelProcess {
 public:
  ModelProcess(std::string command, int dimension, double timeout_seconds);
  ~ModelProcess();
  ModelProcess(const ModelProcess&) = delete;
  ModelProcess& operator=(const ModelProcess&) = delete;

  /// Throws ModelProtocolError on a malformed reply, timeout, or process exit.
  double evaluate(const Eigen::VectorXd& x);
  void restart();
  [[nodiscard]] bool alive() const { return pid_ > 0; }

 private:
  void spawn();
  void stop();
  std::string read_line();

  std::string command_;
  int dimension_;
  double timeout_seconds_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

/// Black-box model backed by k processes. Batches are split into k contiguous chunks, one per process.
class ExternalModel final : public Model {
 public:
  ExternalModel(int dimension, const ExternalModelSpec& spec);

  Eigen::VectorXd evaluate_batch(const Eigen::MatrixXd& points) override;
  [[nodiscard]] int pool_size() const { return static_cast<int>(processes_.size()); }

 protected:
  double evaluate(const Eigen::VectorXd& x) override;

 private:
  double call(ModelProcess& p, const Eigen::VectorXd& x);

  ExternalModelSpec spec_;
  std::vector<std::unique_ptr<ModelProcess>> processes_;
};

/// Builtin polynomial models or an external process, per the config's model table.
std::unique_ptr<Model> make_model(const ModelSpec& spec, int dimension);

}  // namespace gadd
