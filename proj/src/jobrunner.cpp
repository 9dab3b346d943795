#include "tlreflect/jobrunner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <thread>

namespace tlr {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_residual(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

namespace {

double wall_ms_since(std::chrono::steady_clock::time_point start) {
  const auto elapsed = std::chrono::steady_clock::now() - start;
  return std::chrono::duration<double, std::milli>(elapsed).count();
}

cplx parse_complex(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(ErrorCode::ConfigInvalid,
                where + " must be a [re, im] pair of numbers");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<cplx> parse_complex_vector(const json& j, std::size_t n,
                                       const std::string& where) {
  if (!j.is_array() || j.size() != n) {
    throw Error(ErrorCode::ConfigInvalid,
                where + " must be an array of length " + std::to_string(n));
  }
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = parse_complex(j[i], where);
  return out;
}

CMatrix parse_matrix(const json& j, std::size_t n, const std::string& where) {
  if (!j.is_array() || j.size() != n * n) {
    throw Error(ErrorCode::ConfigInvalid,
                where + " must be a row-major array of " + std::to_string(n * n) +
                    " [re, im] pairs");
  }
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      m(i, k) = parse_complex(j[i * n + k], where);
  return m;
}

ModelSpec parse_model(const json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::ConfigInvalid, "model must be an object");
  }
  ModelSpec spec;
  if (!j.contains("n") || !j["n"].is_number_integer() ||
      j["n"].get<long long>() <= 0) {
    throw Error(ErrorCode::ConfigInvalid, "model.n must be a positive integer");
  }
  spec.n = j["n"].get<std::size_t>();
  spec.lambdas = parse_complex_vector(j.at("lambdas"), spec.n, "model.lambdas");
  const json& exps = j.at("exponents");
  if (!exps.is_array() || exps.size() != spec.n) {
    throw Error(ErrorCode::ConfigInvalid,
                "model.exponents must be an integer array of length n");
  }
  spec.exponents.resize(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    if (!exps[i].is_number_integer()) {
      throw Error(ErrorCode::ConfigInvalid, "model.exponents must be integers");
    }
    spec.exponents[i] = exps[i].get<long>();
  }
  if (j.contains("branch")) {
    const std::string branch = j["branch"].get<std::string>();
    if (branch == "plus") {
      spec.branch = Branch::Plus;
    } else if (branch == "minus") {
      spec.branch = Branch::Minus;
    } else {
      throw Error(ErrorCode::ConfigInvalid, "model.branch must be plus or minus");
    }
  }
  if (j.contains("vw")) {
    const json& vw = j["vw"];
    spec.vw = {parse_complex_vector(vw.at("v"), spec.n, "model.vw.v"),
               parse_complex_vector(vw.at("w"), spec.n, "model.vw.w")};
  }
  if (j.contains("h")) {
    spec.h = parse_matrix(j["h"], spec.n, "model.h");
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
  return spec;
}

KBlockPlan parse_plan(const json& j, std::size_t n, const Tolerance& tol) {
  if (!j.is_object() || !j.contains("classes")) {
    throw Error(ErrorCode::ConfigInvalid, "plan must be {\"classes\": [...]}");
  }
  KBlockPlan plan;
  for (const json& jcls : j["classes"]) {
    DClass cls;
    cls.d = parse_complex(jcls.at("d"), "class d");
    for (const json& jsub : jcls.at("subblocks")) {
      const std::string kind = jsub.at("kind").get<std::string>();
      SubBlock sub;
      if (kind == "zero") {
        sub.kind = BlockKind::Zero;
        sub.size = jsub.at("size").get<std::size_t>();
      } else if (kind == "nilpotent") {
        sub.kind = BlockKind::Nilpotent;
        sub.size = jsub.at("t").get<std::size_t>();
        sub.rank = jsub.at("m").get<std::size_t>();
      } else if (kind == "involution") {
        sub.kind = BlockKind::Involution;
        sub.size = jsub.at("s").get<std::size_t>();
        sub.rank = sub.size / 2;
        sub.delta_prime = jsub.contains("delta_prime")
                              ? parse_complex(jsub["delta_prime"], "delta_prime")
                              : cplx(1.0, 0.0);
      } else if (kind == "two_eigen") {
        sub.kind = BlockKind::TwoEigen;
        sub.size = jsub.at("s").get<std::size_t>();
        sub.rank = jsub.at("m_prime").get<std::size_t>();
      } else {
        throw Error(ErrorCode::ConfigInvalid, "unknown subblock kind " + kind);
      }
      cls.subblocks.push_back(std::move(sub));
    }
    plan.classes.push_back(std::move(cls));
  }
  plan.validate(n, tol);
  return plan;
}

const std::vector<std::string> kKnownTasks = {
    "validate", "tl", "ybe", "sample", "reflect", "components", "moduli"};

bool wants(const JobConfig& config, const std::string& task) {
  return std::find(config.tasks.begin(), config.tasks.end(), task) !=
         config.tasks.end();
}

// block-invariant residuals reported by the sample task
ordered_json block_report(const SubBlock& sub, const Tolerance& tol) {
  ordered_json entry;
  entry["kind"] = block_kind_name(sub.kind);
  entry["size"] = sub.size;
  if (sub.kind == BlockKind::Zero) {
    entry["pass"] = true;
    return entry;
  }
  entry["rank_param"] = sub.rank;
  const CMatrix& blk = sub.block;
  const std::size_t s = sub.size;
  double diag_max = 0.0;
  for (std::size_t i = 0; i < s; ++i)
    diag_max = std::max(diag_max, std::abs(blk(i, i)));
  const double scale = 1.0 + blk.frobenius_norm() * blk.frobenius_norm();

  bool pass = true;
  if (sub.kind == BlockKind::Nilpotent) {
    const double sq = (blk * blk).frobenius_norm() / scale;
    const std::size_t rank = numeric_rank(blk, tol);
    entry["square_norm"] = format_residual(sq);
    entry["diag_max"] = format_residual(diag_max);
    entry["rank"] = rank;
    pass = sq <= tol.eps_rel && diag_max <= tol.eps_rel && rank == sub.rank;
  } else if (sub.kind == BlockKind::Involution) {
    const CMatrix target = sub.delta_prime * CMatrix::identity(s);
    const double quad = rel_residual(blk * blk, target);
    const double trace = std::abs(blk.trace());
    entry["quadratic_residual"] = format_residual(quad);
    entry["diag_max"] = format_residual(diag_max);
    entry["trace"] = format_residual(trace);
    pass = quad <= tol.eps_rel && diag_max <= tol.eps_rel && trace <= tol.eps_rel;
  } else {
    const auto [z1, z2] = eigen_pair(sub.size, sub.rank);
    const cplx delta_s = -z1 * z2;
    const double quad =
        rel_residual(blk * blk + blk, delta_s * CMatrix::identity(s));
    const double trace = std::abs(blk.trace());
    const CMatrix shift1 = blk - z1 * CMatrix::identity(s);
    const CMatrix shift2 = blk - z2 * CMatrix::identity(s);
    const double minpoly = (shift1 * shift2).frobenius_norm() / scale;
    const std::size_t mult = numeric_rank(shift2, tol);
    entry["quadratic_residual"] = format_residual(quad);
    entry["trace"] = format_residual(trace);
    entry["diag_max"] = format_residual(diag_max);
    entry["minpoly_residual"] = format_residual(minpoly);
    entry["z1_multiplicity"] = mult;
    pass = quad <= tol.eps_rel && trace <= tol.eps_rel &&
           diag_max <= tol.eps_rel && minpoly <= tol.eps_rel &&
           mult == sub.rank;
  }
  entry["pass"] = pass;
  return entry;
}

struct SeedOutcome {
  std::uint64_t seed = 0;
  ordered_json sample;
  ordered_json reflect;
  ordered_json components;
  bool have_sample = false;
  bool have_reflect = false;
  bool have_components = false;
};

SeedOutcome run_seed(const JobConfig& config, const TLData& data,
                     const CMatrix& r_mat, std::uint64_t seed) {
  SeedOutcome outcome;
  outcome.seed = seed;
  const auto started = std::chrono::steady_clock::now();
  try {
    const AssembledK assembled = assemble_K(*config.plan, data, seed, config.tol);
    if (wants(config, "sample")) {
      ordered_json entry;
      entry["task"] = "sample";
      entry["seed"] = seed;
      bool pass = true;
      ordered_json blocks = ordered_json::array();
      for (std::size_t c = 0; c < assembled.sampled.size(); ++c) {
        for (std::size_t u = 0; u < assembled.sampled[c].size(); ++u) {
          ordered_json b = block_report(assembled.sampled[c][u], config.tol);
          b["class"] = c;
          b["subblock"] = u;
          pass = pass && b["pass"].get<bool>();
          blocks.push_back(std::move(b));
        }
      }
      entry["blocks"] = std::move(blocks);
      entry["pass"] = pass;
      entry["wall_ms"] = wall_ms_since(started);
      outcome.sample = std::move(entry);
      outcome.have_sample = true;
    }
    if (wants(config, "reflect")) {
      const auto t0 = std::chrono::steady_clock::now();
      ordered_json entry;
      entry["task"] = "reflect";
      entry["seed"] = seed;
      const double refl = reflection_residual(r_mat, assembled.k_original);
      double alg_max = 0.0;
      for (std::size_t r = 0; r < data.spec.n; ++r) {
        alg_max = std::max(
            alg_max, algebraic_residual(data, assembled.k_original, r));
      }
      entry["reflection_residual"] = format_residual(refl);
      entry["algebraic_residual_max"] = format_residual(alg_max);
      entry["pass"] = refl <= config.tol.eps_rel && alg_max <= config.tol.eps_rel;
      entry["wall_ms"] = wall_ms_since(t0);
      outcome.reflect = std::move(entry);
      outcome.have_reflect = true;
    }
    if (wants(config, "components")) {
      const auto t0 = std::chrono::steady_clock::now();
      ordered_json entry;
      entry["task"] = "components";
      entry["seed"] = seed;
      const std::vector<double> residuals =
          component_residuals(data, assembled.k_master);
      double worst = 0.0;
      for (double r : residuals) worst = std::max(worst, r);
      entry["component_residual_max"] = format_residual(worst);
      entry["pass"] = worst <= config.tol.eps_rel;
      entry["wall_ms"] = wall_ms_since(t0);
      outcome.components = std::move(entry);
      outcome.have_components = true;
    }
  } catch (const Error& e) {
    for (const char* task : {"sample", "reflect", "components"}) {
      if (!wants(config, task)) continue;
      ordered_json entry;
      entry["task"] = task;
      entry["seed"] = seed;
      entry["error"] = e.what();
      entry["pass"] = false;
      if (std::string(task) == "sample") {
        outcome.sample = entry;
        outcome.have_sample = true;
      } else if (std::string(task) == "reflect") {
        outcome.reflect = entry;
        outcome.have_reflect = true;
      } else {
        outcome.components = entry;
        outcome.have_components = true;
      }
    }
  }
  return outcome;
}

ordered_json conventions(const JobConfig& config) {
  ordered_json c;
  c["qprime_equation"] = "q'^2 + sqrt(n) q' + 1 = 0";
  c["qprime_branch"] = config.model.branch == Branch::Plus ? "plus" : "minus";
  c["r_matrix"] = "braid normalization R = q I + T, q = sqrt(n) q'";
  c["mu_normalization"] =
      "S^{-1} mu_r S = tr(WV) e_rr (n e_rr in the plain case)";
  c["master_basis"] = "columns lambda_j^{n_i}, weighted by V_i when V,W given";
  c["d_nonzero_scaling"] = "K_d^o = ((n + 2q)/q) d W for W^2 + W = delta I";
  c["dimension_counting"] = "complex; real tangent dimensions are halved";
  c["tensor_convention"] = "site 1 is the left Kronecker factor";
  return c;
}

} // namespace

namespace {

JobConfig parse_config_impl(const json& input) {
  if (!input.is_object()) {
    throw Error(ErrorCode::ConfigInvalid, "config must be a JSON object");
  }
  JobConfig config;
  if (input.contains("tolerances")) {
    const json& t = input["tolerances"];
    if (t.contains("eps_rel")) config.tol.eps_rel = t["eps_rel"].get<double>();
    if (t.contains("eps_rank")) config.tol.eps_rank = t["eps_rank"].get<double>();
    if (t.contains("eps_newton"))
      config.tol.eps_newton = t["eps_newton"].get<double>();
    if (t.contains("fd_step")) config.tol.fd_step = t["fd_step"].get<double>();
    config.tol.validate();
  }
  if (!input.contains("model")) {
    throw Error(ErrorCode::ConfigInvalid, "config needs a model object");
  }
  config.model = parse_model(input["model"]);
  if (input.contains("plan")) {
    config.plan = parse_plan(input["plan"], config.model.n, config.tol);
  }
  if (input.contains("seeds")) {
    config.seeds.clear();
    for (const json& s : input["seeds"]) {
      if (!s.is_number_integer() ||
          (!s.is_number_unsigned() && s.get<long long>() < 0)) {
        throw Error(ErrorCode::ConfigInvalid, "seeds must be nonnegative integers");
      }
      config.seeds.push_back(s.get<std::uint64_t>());
    }
    if (config.seeds.empty()) {
      throw Error(ErrorCode::ConfigInvalid, "seeds must not be empty");
    }
  }
  if (input.contains("tasks")) {
    for (const json& t : input["tasks"]) {
      const std::string name = t.get<std::string>();
      if (std::find(kKnownTasks.begin(), kKnownTasks.end(), name) ==
          kKnownTasks.end()) {
        throw Error(ErrorCode::ConfigInvalid, "unknown task " + name);
      }
      config.tasks.push_back(name);
    }
  } else {
    config.tasks = {"validate", "tl", "ybe"};
    if (config.plan) {
      config.tasks.insert(config.tasks.end(),
                          {"sample", "reflect", "components", "moduli"});
    }
  }
  for (const char* needs_plan : {"sample", "reflect", "components", "moduli"}) {
    if (wants(config, needs_plan) && !config.plan) {
      throw Error(ErrorCode::ConfigInvalid,
                  std::string("task ") + needs_plan + " requires a plan");
    }
  }
  return config;
}

} // namespace

JobConfig parse_config(const json& input) {
  try {
    return parse_config_impl(input);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
}

RunResult run_job(const JobConfig& config) {
  const auto job_start = std::chrono::steady_clock::now();
  RunResult result;
  ordered_json& report = result.report;
  report["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  report["conventions"] = conventions(config);
  report["tolerances"] = {{"eps_rel", config.tol.eps_rel},
                          {"eps_rank", config.tol.eps_rank},
                          {"eps_newton", config.tol.eps_newton},
                          {"fd_step", config.tol.fd_step}};
  report["seeds"] = config.seeds;
  ordered_json tasks = ordered_json::array();
  bool all_pass = true;

  // validate
  if (wants(config, "validate")) {
    const auto t0 = std::chrono::steady_clock::now();
    ordered_json entry;
    entry["task"] = "validate";
    try {
      const HadamardVerdict verdict = validate_model(config.model, config.tol);
      entry["property"] =
          verdict.property == HadamardProperty::Plain ? "plain" : "vw";
      entry["residual"] = format_residual(verdict.residual);
      entry["pass"] = verdict.passes;
    } catch (const Error& e) {
      entry["error"] = e.what();
      entry["pass"] = false;
    }
    entry["wall_ms"] = wall_ms_since(t0);
    all_pass = all_pass && entry["pass"].get<bool>();
    tasks.push_back(std::move(entry));
  }

  const bool needs_data = wants(config, "tl") || wants(config, "ybe") ||
                          wants(config, "sample") || wants(config, "reflect") ||
                          wants(config, "components");
  std::optional<TLData> data;
  std::string data_error;
  if (needs_data) {
    try {
      data = build_tl_data(config.model, config.tol);
    } catch (const Error& e) {
      data_error = e.what();
    }
  }

  const auto emit_blocked = [&](const char* task) {
    ordered_json entry;
    entry["task"] = task;
    entry["error"] = data_error;
    entry["pass"] = false;
    all_pass = false;
    tasks.push_back(std::move(entry));
  };

  if (wants(config, "tl")) {
    if (!data) {
      emit_blocked("tl");
    } else {
      const auto t0 = std::chrono::steady_clock::now();
      const TLCheckReport tl = tl_check(*data, config.tol);
      ordered_json entry;
      entry["task"] = "tl";
      entry["idempotent"] = format_residual(tl.idempotent);
      entry["braid_left"] = format_residual(tl.braid_left);
      entry["braid_right"] = format_residual(tl.braid_right);
      entry["pass"] = tl.passes(config.tol.eps_rel);
      entry["wall_ms"] = wall_ms_since(t0);
      all_pass = all_pass && entry["pass"].get<bool>();
      tasks.push_back(std::move(entry));
    }
  }
  if (wants(config, "ybe")) {
    if (!data) {
      emit_blocked("ybe");
    } else {
      const auto t0 = std::chrono::steady_clock::now();
      const double residual = ybe_residual(*data, config.tol);
      ordered_json entry;
      entry["task"] = "ybe";
      entry["residual"] = format_residual(residual);
      entry["pass"] = residual <= config.tol.eps_rel;
      entry["wall_ms"] = wall_ms_since(t0);
      all_pass = all_pass && entry["pass"].get<bool>();
      tasks.push_back(std::move(entry));
    }
  }

  const bool seed_work = wants(config, "sample") || wants(config, "reflect") ||
                         wants(config, "components");
  if (seed_work) {
    if (!data) {
      for (const char* task : {"sample", "reflect", "components"}) {
        if (wants(config, task)) emit_blocked(task);
      }
    } else {
      const CMatrix r_mat = build_R(*data);
      std::vector<SeedOutcome> outcomes(config.seeds.size());
      const int workers = std::max(
          1, std::min<int>(config.parallel,
                           static_cast<int>(config.seeds.size())));
      if (workers <= 1) {
        for (std::size_t i = 0; i < config.seeds.size(); ++i) {
          outcomes[i] = run_seed(config, *data, r_mat, config.seeds[i]);
        }
      } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
          pool.emplace_back([&] {
            while (true) {
              const std::size_t i = next.fetch_add(1);
              if (i >= config.seeds.size()) break;
              outcomes[i] =
                  run_seed(config, *data, r_mat, config.seeds[i]);
            }
          });
        }
        for (std::thread& t : pool) t.join();
      }
      // merge in seed order, task-major, so the report is order-independent
      for (const char* task : {"sample", "reflect", "components"}) {
        const std::string name = task;
        for (const SeedOutcome& o : outcomes) {
          const ordered_json* entry = nullptr;
          if (name == "sample" && o.have_sample) entry = &o.sample;
          if (name == "reflect" && o.have_reflect) entry = &o.reflect;
          if (name == "components" && o.have_components) entry = &o.components;
          if (entry) {
            all_pass = all_pass && (*entry)["pass"].get<bool>();
            tasks.push_back(*entry);
          }
        }
      }
    }
  }

  if (wants(config, "moduli")) {
    // one check per distinct non-zero subblock signature in the plan
    std::set<std::tuple<BlockKind, std::size_t, std::size_t>> seen;
    for (const DClass& cls : config.plan->classes) {
      for (const SubBlock& sub : cls.subblocks) {
        if (sub.kind == BlockKind::Zero) continue;
        if (!seen.insert({sub.kind, sub.size, sub.rank}).second) continue;
        const auto t0 = std::chrono::steady_clock::now();
        ordered_json entry;
        entry["task"] = "moduli";
        entry["kind"] = block_kind_name(sub.kind);
        entry["size"] = sub.size;
        entry["rank_param"] = sub.rank;
        bool done = false;
        std::string last_error;
        for (std::uint64_t attempt = 0; attempt < 5 && !done; ++attempt) {
          const std::uint64_t seed =
              derive_seed(config.seeds.front(), 0xA0D0 + seen.size(), attempt);
          try {
            SubBlock generic;
            switch (sub.kind) {
              case BlockKind::Nilpotent:
                generic = sample_nilpotent(sub.size, sub.rank, seed,
                                           SampleMode::Generic, config.tol);
                break;
              case BlockKind::Involution:
                generic = sample_involution(sub.size, sub.delta_prime, seed,
                                            SampleMode::Generic, config.tol);
                break;
              default:
                generic = sample_two_eigen(sub.size, sub.rank, seed,
                                           SampleMode::Generic, config.tol);
                break;
            }
            const ModuliReport moduli = numeric_moduli_check(generic, config.tol);
            entry["moduli_complex"] = moduli.moduli_real / 2;
            entry["moduli_real"] = moduli.moduli_real;
            entry["expected_complex"] = moduli.expected_complex;
            entry["tangent_real"] = moduli.tangent_real;
            entry["gauge_real"] = moduli.gauge_real;
            entry["constraint_rank"] = moduli.constraint_rank;
            entry["seed"] = seed;
            entry["pass"] = moduli.passes;
            done = true;
          } catch (const Error& e) {
            if (e.code() == ErrorCode::RankUnstable ||
                e.code() == ErrorCode::NewtonFail) {
              last_error = e.what();
              continue;
            }
            last_error = e.what();
            break;
          }
        }
        if (!done) {
          entry["error"] = last_error;
          entry["pass"] = false;
        }
        entry["wall_ms"] = wall_ms_since(t0);
        all_pass = all_pass && entry["pass"].get<bool>();
        tasks.push_back(std::move(entry));
      }
    }
  }

  report["tasks"] = std::move(tasks);
  report["overall_pass"] = all_pass;
  report["timing"] = {{"total_wall_ms", wall_ms_since(job_start)}};
  result.all_pass = all_pass;
  return result;
}

std::string summarize(const ordered_json& report) {
  std::ostringstream out;
  out << report["tool"]["name"].get<std::string>() << " "
      << report["tool"]["version"].get<std::string>() << "\n";
  for (const auto& entry : report["tasks"]) {
    out << (entry["pass"].get<bool>() ? "[PASS] " : "[FAIL] ");
    out << entry["task"].get<std::string>();
    if (entry.contains("seed")) out << " seed=" << entry["seed"];
    if (entry.contains("kind")) {
      out << " " << entry["kind"].get<std::string>() << "("
          << entry["size"] << ")";
    }
    if (entry.contains("residual"))
      out << " residual=" << entry["residual"].get<std::string>();
    if (entry.contains("reflection_residual"))
      out << " reflection=" << entry["reflection_residual"].get<std::string>();
    if (entry.contains("component_residual_max"))
      out << " components=" << entry["component_residual_max"].get<std::string>();
    if (entry.contains("moduli_complex"))
      out << " moduli=" << entry["moduli_complex"]
          << " expected=" << entry["expected_complex"];
    if (entry.contains("error"))
      out << " error=" << entry["error"].get<std::string>();
    out << "\n";
  }
  out << (report["overall_pass"].get<bool>() ? "overall: PASS" : "overall: FAIL")
      << "\n";
  return out.str();
}

} // namespace tlr
