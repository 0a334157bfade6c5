#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace edm::cli {

// Flag values shared by all subcommands. Sentinels mark flags left unset.
struct Invocation {
  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string in;
  std::string out;
  std::vector<std::string> features;
  std::string label;
  std::size_t k = 0;
  bool k_set = false;
  std::string model;
  std::vector<std::string> labels;
  double train_fraction = 0.0;
  bool train_fraction_set = false;
  bool discretize = false;
};

void cmd_synth(const Invocation& inv, std::ostream& out);
void cmd_clean(const Invocation& inv, std::ostream& out);
void cmd_discretize(const Invocation& inv, std::ostream& out);
void cmd_cluster(const Invocation& inv, std::ostream& out);
void cmd_train(const Invocation& inv, std::ostream& out);
void cmd_predict(const Invocation& inv, std::ostream& out);
void cmd_evaluate(const Invocation& inv, std::ostream& out);
void cmd_report(const Invocation& inv, std::ostream& out);

}  // namespace edm::cli
