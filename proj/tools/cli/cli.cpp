#include "cli/cli.hpp"

#include <algorithm>
#include <exception>
#include <functional>
#include <map>
#include <ostream>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cli/commands.hpp"
#include "edm/error.hpp"

namespace edm::cli {
namespace {

std::string quoted(std::string_view message) {
  std::string out;
  for (char c : message) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c == '\n' ? ' ' : c);
  }
  return out;
}

void report(std::ostream& err, std::string_view kind, std::string_view command, std::string_view message) {
  err << fmt::format("edm: error kind={} command={} message=\"{}\"\n", kind,
                     command.empty() ? "-" : command, quoted(message));
}

using Handler = void (*)(const Invocation&, std::ostream&);

struct Command {
  const char* name;
  const char* help;
  Handler handler;
};

constexpr Command kCommands[] = {
    {"synth", "Generate a synthetic raw cohort CSV", cmd_synth},
    {"clean", "Two-stage missing-value cleaning with an audited report", cmd_clean},
    {"discretize", "Replace numeric columns by their configured bands", cmd_discretize},
    {"cluster", "k-means clustering; writes cluster labels C1..Ck", cmd_cluster},
    {"train", "Fit a naive Bayes classifier on a seeded train split", cmd_train},
    {"predict", "Predict labels with a saved model", cmd_predict},
    {"evaluate", "Confusion matrix and column-normalized percentage table", cmd_evaluate},
    {"report", "Hierarchical overall ranking and per-year summaries", cmd_report},
};

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kMalformedRow:
    case ErrorKind::kUnknownCategory:
    case ErrorKind::kInsufficientData:
    case ErrorKind::kEmptyMatrix:
      return kExitData;
    case ErrorKind::kSchemaMismatch:
    case ErrorKind::kInvalidBands:
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kInvalidConfig:
    case ErrorKind::kIo:
      return kExitUsage;
  }
  return kExitUsage;
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"edm: educational data-mining toolkit"};
  app.name("edm");
  app.require_subcommand(1);

  Invocation inv;
  std::map<CLI::App*, const Command*> subcommands;
  for (const auto& command : kCommands) {
    auto* sub = app.add_subcommand(command.name, command.help);
    sub->add_option("--config", inv.config_path, "Toolkit config file (JSON with comments)");
    sub->add_option("--seed", inv.seed, "Seed for every random choice");
    sub->add_option("--out", inv.out, "Output directory")->required();
    const std::string_view name = command.name;
    if (name != "synth") sub->add_option("--in", inv.in, "Input CSV")->required();
    if (name == "discretize" || name == "cluster" || name == "train") {
      sub->add_option("--features", inv.features, "Comma-separated feature columns")->delimiter(',');
    }
    if (name == "train" || name == "evaluate") {
      sub->add_option("--label", inv.label, "Label column");
    }
    if (name == "cluster") sub->add_option("--k", inv.k, "Number of clusters");
    if (name == "train") {
      sub->add_option("--train-fraction", inv.train_fraction, "Share of rows used for fitting");
      sub->add_flag("--discretize", inv.discretize, "Fit on banded features");
    }
    if (name == "predict") sub->add_option("--model", inv.model, "Model file from train")->required();
    if (name == "evaluate") {
      sub->add_option("--labels", inv.labels, "Comma-separated label order")->delimiter(',');
    }
    subcommands.emplace(sub, &command);
  }

  // CLI11 consumes arguments from the back and does not expect the program name.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  const Command* selected = nullptr;
  try {
    app.parse(reversed);
    for (auto* sub : app.get_subcommands()) selected = subcommands.at(sub);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      app.exit(e, out, err);
      return kExitOk;
    }
    std::string command;
    for (auto* sub : app.get_subcommands()) command = sub->get_name();
    report(err, "usage", command, e.what());
    return kExitUsage;
  }

  inv.command = selected->name;
  for (auto* sub : app.get_subcommands()) {
    inv.seed_set = sub->count("--seed") > 0;
    inv.k_set = sub->get_option_no_throw("--k") != nullptr && sub->count("--k") > 0;
    inv.train_fraction_set =
        sub->get_option_no_throw("--train-fraction") != nullptr && sub->count("--train-fraction") > 0;
  }

  try {
    selected->handler(inv, out);
    return kExitOk;
  } catch (const Error& e) {
    report(err, to_string(e.kind()), inv.command, e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    report(err, "internal", inv.command, e.what());
    return 1;
  }
}

}  // namespace edm::cli
