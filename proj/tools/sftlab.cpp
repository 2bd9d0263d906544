#include <CLI11.hpp>
#include <iostream>

#include "sftlab/experiments.hpp"

using namespace sftlab;

namespace {

struct CommonFlags {
  std::string spec;
  std::string out;
  std::string format = "json";
  std::uint64_t budget = Budget::kDefaultLimit;
  std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool spec_required = true) {
  auto* opt = cmd->add_option("--spec", flags.spec,
                              "spec JSON path or builtin:<name> (golden_mean, hard_square, "
                              "glider3, full:<k>:<d>, tracks:<a>x<b>:<d>)");
  if (spec_required) opt->required();
  cmd->add_option("--out", flags.out, "output file; stdout when omitted");
  cmd->add_option("--format", flags.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--budget", flags.budget, "node budget for searches");
  cmd->add_option("--seed", flags.seed, "random seed for randomized experiments");
}

int finish(const Json& report, const CommonFlags& flags) {
  Json out = report;
  out["timestamp"] = static_cast<long>(time(nullptr));  // excluded from determinism comparisons
  if (flags.out.empty()) {
    if (flags.format == "csv" && out.contains("table"))
      std::cout << report_to_csv(out);
    else
      std::cout << out.dump(2) << "\n";
  } else {
    emit_report(out, flags.out, flags.format);
  }
  if (out.value("budget_exceeded", false)) return 2;
  if (out.contains("all_pass") && !out["all_pass"].get<bool>()) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sftlab: exact experiments on Z^d shifts of finite type"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App* cmd;
    CommonFlags flags;
    Json params = Json::object();
  };
  std::map<std::string, Sub> subs;

  auto make_sub = [&](const std::string& name, const std::string& desc, bool spec_required) {
    Sub& sub = subs[name];
    sub.cmd = app.add_subcommand(name, desc);
    add_common(sub.cmd, sub.flags, spec_required);
    return sub.cmd;
  };

  {
    auto* c = make_sub("entropy", "per-box normalized pattern counts", true);
    c->add_option("--n-min", [&](auto v) { subs["entropy"].params["n_min"] = std::stoi(v[0]); return true; }, "smallest box side");
    c->add_option("--n-max", [&](auto v) { subs["entropy"].params["n_max"] = std::stoi(v[0]); return true; }, "largest box side");
  }
  {
    auto* c = make_sub("fix", "periodic point counts", true);
    c->add_option("--n-min", [&](auto v) { subs["fix"].params["n_min"] = std::stoi(v[0]); return true; }, "first diagonal lattice nZ^d");
    c->add_option("--n-max", [&](auto v) { subs["fix"].params["n_max"] = std::stoi(v[0]); return true; }, "last diagonal lattice");
    c->add_option("--lattice", [&](auto v) {
      // rows separated by ';', entries by ','
      Json rows = Json::array();
      std::stringstream ss(v[0]);
      std::string row;
      while (std::getline(ss, row, ';')) {
        Json r = Json::array();
        std::stringstream rs(row);
        std::string cell;
        while (std::getline(rs, cell, ',')) r.push_back(std::stoll(cell));
        rows.push_back(r);
      }
      subs["fix"].params["lattice"] = rows;
      return true;
    }, "explicit basis matrix, e.g. \"2,1;0,2\"");
  }
  {
    auto* c = make_sub("extensions", "boundary extension table", true);
    c->add_option("--box", [&](auto v) { subs["extensions"].params["box"] = std::stoi(v[0]); return true; }, "box side length");
    c->add_option("--S", [&](auto v) { subs["extensions"].params["S"] = std::stod(v[0]); return true; }, "boundary margin");
  }
  {
    auto* c = make_sub("beeps", "boundary extension entropy production statistic", true);
    c->add_option("--box", [&](auto v) { subs["beeps"].params["box"] = std::stoi(v[0]); return true; }, "box side length");
    c->add_option("--S", [&](auto v) { subs["beeps"].params["S"] = std::stod(v[0]); return true; }, "boundary margin");
  }
  {
    auto* c = make_sub("localq", "entropy recovery sequence a_n", true);
    c->add_option("--base-k", [&](auto v) { subs["localq"].params["base_k"] = std::stoi(v[0]); return true; }, "odd tower base");
    c->add_option("--S", [&](auto v) { subs["localq"].params["S"] = std::stod(v[0]); return true; }, "boundary margin");
    c->add_option("--n-max", [&](auto v) { subs["localq"].params["n_max"] = std::stoi(v[0]); return true; }, "deepest level");
  }
  {
    auto* c = make_sub("glider", "glider decomposition sweep", true);
    c->add_option("--R", [&](auto v) { subs["glider"].params["R"] = std::stoi(v[0]); return true; }, "glider radius");
    c->add_option("--count", [&](auto v) { subs["glider"].params["count"] = std::stoi(v[0]); return true; }, "random configurations");
    c->add_option("--steps", [&](auto v) { subs["glider"].params["steps"] = std::stol(v[0]); return true; }, "step budget");
    c->add_option("--support-cells", [&](auto v) { subs["glider"].params["support_cells"] = std::stoi(v[0]); return true; }, "max support cells");
    c->add_option("--window", [&](auto v) { subs["glider"].params["window"] = std::stoi(v[0]); return true; }, "initial support window");
    c->add_flag("--no-verify", [&](auto) { subs["glider"].params["verify"] = false; }, "skip involution certification");
  }
  {
    auto* c = make_sub("permuter", "homoclinic orbit permuter", true);
    c->add_option("--plan", [&](auto v) {
      subs["permuter"].params = Json::parse(read_text_file(v[0]));
      return true;
    }, "JSON file with points, perm, M, N")->required();
  }
  {
    auto* c = make_sub("sqroot", "square-root obstruction / explicit root", true);
    c->add_option("--lattice-k", [&](auto v) { subs["sqroot"].params["lattice_k"] = std::stoi(v[0]); return true; }, "index of the sublattice in direction e1");
    c->add_option("--max-fix-n", [&](auto v) { subs["sqroot"].params["max_fix_n"] = std::stoi(v[0]); return true; }, "verify the root on Fix(nZ) up to n");
  }
  {
    auto* c = make_sub("classify", "full-shift classification predicate", false);
    c->add_option("--a", [&](auto v) { subs["classify"].params["a"] = std::stol(v[0]); return true; }, "first alphabet size")->required();
    c->add_option("--b", [&](auto v) { subs["classify"].params["b"] = std::stol(v[0]); return true; }, "second alphabet size")->required();
  }
  {
    auto* c = make_sub("verify", "run the per-module invariant suite", true);
    c->add_option("--depth", [&](auto v) { subs["verify"].params["depth"] = v[0]; return true; }, "small or medium");
  }
  {
    auto* c = make_sub("run", "run a batch plan file", false);
    c->add_option("--plan", [&](auto v) { subs["run"].params["plan_path"] = v[0]; return true; }, "JSON plan or array of plans")->required();
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (auto& [name, sub] : subs) {
      if (!sub.cmd->parsed()) continue;
      if (name == "run") {
        Json plans = Json::parse(read_text_file(sub.params["plan_path"].get<std::string>()));
        if (!plans.is_array()) plans = Json::array({plans});
        Json combined = Json::array();
        int worst = 0;
        for (const auto& pj : plans) {
          ExperimentPlan plan = plan_from_json(pj);
          Json rep = run_experiment(plan);
          if (rep.value("budget_exceeded", false)) worst = std::max(worst, 2);
          combined.push_back(rep);
        }
        Json report{{"experiment", "batch"}, {"reports", combined}};
        int rc = finish(report, sub.flags);
        return worst ? worst : rc;
      }
      ExperimentPlan plan;
      plan.experiment = name;
      plan.spec_source = sub.flags.spec;
      plan.params = sub.params;
      plan.seed = sub.flags.seed;
      plan.budget = sub.flags.budget;
      return finish(run_experiment(plan), sub.flags);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
