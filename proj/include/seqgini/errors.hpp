#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace seqgini {

// Base class for all library errors.
class error : public std::runtime_error {
  public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// An observation was rejected at ingestion (incomes must be finite and > 0).
class rejected_observation_error : public error {
  public:
    explicit rejected_observation_error(double value)
        : error("rejected observation: incomes must be finite and > 0, got " +
                std::to_string(value)),
          value_(value) {}

    double value() const noexcept { return value_; }

  private:
    double value_;
};

// An estimator was asked for on a sample smaller than it is defined for.
class insufficient_sample_error : public error {
  public:
    insufficient_sample_error(const std::string& what_stat, std::size_t needed,
                              std::size_t got)
        : error(what_stat + " requires n >= " + std::to_string(needed) +
                ", got n = " + std::to_string(got)),
          needed_(needed),
          got_(got) {}

    std::size_t needed() const noexcept { return needed_; }
    std::size_t got() const noexcept { return got_; }

  private:
    std::size_t needed_;
    std::size_t got_;
};

// A finite observation stream ran dry before the stopping condition held.
class insufficient_data_error : public error {
  public:
    insufficient_data_error(std::size_t n_reached, double last_threshold)
        : error("observation stream exhausted before stopping: consumed " +
                std::to_string(n_reached) + " observations, last threshold " +
                std::to_string(last_threshold)),
          n_reached_(n_reached),
          last_threshold_(last_threshold) {}

    std::size_t n_reached() const noexcept { return n_reached_; }
    double last_threshold() const noexcept { return last_threshold_; }

  private:
    std::size_t n_reached_;
    double last_threshold_;
};

// Aggregation was asked for on fewer replications than it needs.
class insufficient_replications_error : public error {
  public:
    explicit insufficient_replications_error(std::size_t got)
        : error("at least 2 replications are required, got " + std::to_string(got)) {}
};

// Adaptive quadrature failed to reach the requested tolerance.
class quadrature_error : public error {
  public:
    explicit quadrature_error(const std::string& integral_name)
        : error("numerical integration failed to converge for integral '" +
                integral_name + "'"),
          integral_(integral_name) {}

    const std::string& integral() const noexcept { return integral_; }

  private:
    std::string integral_;
};

// Invalid configuration (study parameters, model parameters, CLI input).
class config_error : public error {
  public:
    explicit config_error(const std::string& msg) : error(msg) {}
};

// A replication inside a Monte Carlo study failed; carries the replication index.
class replication_error : public error {
  public:
    replication_error(std::size_t replication, const std::string& msg)
        : error("replication " + std::to_string(replication) + ": " + msg),
          replication_(replication) {}

    std::size_t replication() const noexcept { return replication_; }

  private:
    std::size_t replication_;
};

}  // namespace seqgini
