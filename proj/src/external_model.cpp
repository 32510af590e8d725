#include "gadd/external_model.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "gadd/errors.hpp"
#include "gadd/io.hpp"

namespace gadd {

namespace {

// Timeout or exit; the restart policy applies to these, never to malformed replies.
class ProcessFailure : public ModelProtocolError {
 public:
  using ModelProtocolError::ModelProtocolError;
};

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

std::string short_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string quoted(std::string s) {
  if (s.size() > 200) s = s.substr(0, 200) + "...";
  return "\"" + s + "\"";
}

}  // namespace

ModelProcess::ModelProcess(std::string command, int dimension, double timeout_seconds)
    : command_(std::move(command)), dimension_(dimension), timeout_seconds_(timeout_seconds) {
  ignore_sigpipe();
  spawn();
}

ModelProcess::~ModelProcess() { stop(); }

void ModelProcess::spawn() {
  int in[2], out[2];
  if (pipe2(in, O_CLOEXEC) != 0) throw ResourceError(std::string("pipe: ") + std::strerror(errno));
  if (pipe2(out, O_CLOEXEC) != 0) {
    close(in[0]);
    close(in[1]);
    throw ResourceError(std::string("pipe: ") + std::strerror(errno));
  }
  const pid_t pid = fork();
  if (pid < 0) {
    for (int fd : {in[0], in[1], out[0], out[1]}) close(fd);
    throw ResourceError(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    dup2(in[0], STDIN_FILENO);
    dup2(out[1], STDOUT_FILENO);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in[0]);
  close(out[1]);
  pid_ = pid;
  to_child_ = in[1];
  from_child_ = out[0];
  buffer_.clear();
}

void ModelProcess::stop() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    int status = 0;
    bool reaped = false;
    for (int i = 0; i < 20 && !reaped; ++i) {
      if (waitpid(pid_, &status, WNOHANG) == pid_) reaped = true;
      else std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (!reaped) {
      kill(pid_, SIGKILL);
      waitpid(pid_, &status, 0);
    }
  }
  pid_ = -1;
}

void ModelProcess::restart() {
  stop();
  spawn();
}

std::string ModelProcess::read_line() {
  using clock = std::chrono::steady_clock;
  const auto deadline = clock::now() + std::chrono::duration<double>(timeout_seconds_);
  while (true) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
    if (left <= 0)
      throw ProcessFailure("model process '" + command_ + "' timed out after " + short_real(timeout_seconds_) + " s");
    pollfd pfd{from_child_, POLLIN, 0};
    const int r = poll(&pfd, 1, static_cast<int>(std::min<long long>(left, 1 << 30)));
    if (r < 0) {
      if (errno == EINTR) continue;
      throw ProcessFailure(std::string("poll: ") + std::strerror(errno));
    }
    if (r == 0) continue;
    char chunk[4096];
    const ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProcessFailure(std::string("read from model process: ") + std::strerror(errno));
    }
    if (n == 0)
      throw ProcessFailure("model process '" + command_ + "' exited before replying" +
                           (buffer_.empty() ? std::string() : " (partial output " + quoted(buffer_) + ")"));
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

double ModelProcess::evaluate(const Eigen::VectorXd& x) {
  if (x.size() != dimension_) throw DomainError("model process expects " + std::to_string(dimension_) + " inputs");
  if (pid_ <= 0) spawn();
  std::string line;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (k) line += ' ';
    line += format_real(x(k));
  }
  line += '\n';
  std::size_t sent = 0;
  while (sent < line.size()) {
    const ssize_t n = write(to_child_, line.data() + sent, line.size() - sent);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProcessFailure("model process '" + command_ + "' is not accepting input: " + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
  const std::string reply = read_line();
  std::size_t a = 0, b = reply.size();
  while (a < b && std::isspace(static_cast<unsigned char>(reply[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(reply[b - 1]))) --b;
  const char* first = reply.data() + a;
  const char* last = reply.data() + b;
  if (first < last && *first == '+') ++first;
  double v = 0.0;
  auto [p, ec] = std::from_chars(first, last, v);
  if (a == b || ec != std::errc() || p != last || !std::isfinite(v))
    throw ModelProtocolError("model process '" + command_ + "' replied with malformed line " + quoted(reply) +
                             "; expected one finite decimal number");
  return v;
}

ExternalModel::ExternalModel(int dimension, const ExternalModelSpec& spec) : Model(dimension), spec_(spec) {
  if (spec_.command.empty()) throw ConfigError("external model needs a command");
  if (spec_.pool < 1) throw ConfigError("external model pool size must be >= 1");
  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(dimension);
  for (int k = 0; k < spec_.pool; ++k) {
    processes_.push_back(std::make_unique<ModelProcess>(spec_.command, dimension, spec_.timeout_seconds));
    try {
      (void)processes_.back()->evaluate(origin);
    } catch (const ModelProtocolError& e) {
      throw ModelProtocolError(std::string("handshake at the origin failed: ") + e.what());
    }
  }
}

double ExternalModel::call(ModelProcess& p, const Eigen::VectorXd& x) {
  try {
    return p.evaluate(x);
  } catch (const ProcessFailure&) {
    if (!spec_.restart_on_failure) throw;
    p.restart();
    return p.evaluate(x);
  }
}

double ExternalModel::evaluate(const Eigen::VectorXd& x) { return call(*processes_.front(), x); }

Eigen::VectorXd ExternalModel::evaluate_batch(const Eigen::MatrixXd& points) {
  check_dimension(points.rows());
  const Eigen::Index count = points.cols();
  Eigen::VectorXd out(count);
  const auto k = std::min<Eigen::Index>(static_cast<Eigen::Index>(processes_.size()), std::max<Eigen::Index>(count, 1));
  auto run = [&](Eigen::Index c) {
    const Eigen::Index first = c * count / k;
    const Eigen::Index last = (c + 1) * count / k;
    for (Eigen::Index p = first; p < last; ++p) out(p) = call(*processes_[static_cast<std::size_t>(c)], points.col(p));
  };
  if (k <= 1) {
    run(0);
  } else {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(k));
    std::vector<std::thread> workers;
    for (Eigen::Index c = 0; c < k; ++c)
      workers.emplace_back([&, c] {
        try {
          run(c);
        } catch (...) {
          errors[static_cast<std::size_t>(c)] = std::current_exception();
        }
      });
    for (auto& w : workers) w.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  add_evaluations(static_cast<std::size_t>(count));
  return out;
}

std::unique_ptr<Model> make_model(const ModelSpec& spec, int dimension) {
  if (spec.kind == "quadratic_symmetric") {
    if (dimension != 3) throw ConfigError("quadratic_symmetric is a three-variable model");
    return std::make_unique<PolynomialModel>(quadratic_symmetric(spec.quadratic));
  }
  if (spec.kind == "additive_linear") return std::make_unique<PolynomialModel>(additive_linear(spec.coefficients, spec.constant));
  if (spec.kind == "polynomial") return std::make_unique<PolynomialModel>(polynomial_from_terms(dimension, spec.terms));
  if (spec.kind == "external") return std::make_unique<ExternalModel>(dimension, spec.external);
  throw ConfigError("unknown model kind '" + spec.kind + "'");
}

}  // namespace gadd
