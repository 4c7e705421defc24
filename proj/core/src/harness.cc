// Copyright 2026 The ML-STC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mlstc/harness.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "mlstc/baselines.h"
#include "mlstc/errors.h"
#include "mlstc/slb_oracle.h"
#include "mlstc/stc_codec.h"

namespace mlstc::harness {

using Eigen::Index;
using nlohmann::json;

double measure_distortion(const Eigen::Ref<const Matrix>& original,
                          const Eigen::Ref<const Matrix>& reconstructed) {
  if (original.rows() != reconstructed.rows() || original.cols() != reconstructed.cols()) {
    throw DomainError("measure_distortion: shape mismatch (" + std::to_string(original.rows()) +
                      "x" + std::to_string(original.cols()) + " vs " +
                      std::to_string(reconstructed.rows()) + "x" +
                      std::to_string(reconstructed.cols()) + ")");
  }
  if (original.size() == 0) return 0.0;
  return (original - reconstructed).squaredNorm() / static_cast<double>(original.size());
}

std::string method_name(Method m) {
  switch (m) {
    case Method::kStc: return "stc";
    case Method::kMlStc: return "mlstc";
    case Method::kPcaHash: return "pcah";
    case Method::kLsh: return "lsh";
    case Method::kSlb: return "slb";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::kStc, Method::kMlStc, Method::kPcaHash, Method::kLsh, Method::kSlb}) {
    if (method_name(m) == name) return m;
  }
  throw ConfigError("unknown method \"" + name + "\" (expected stc, mlstc, pcah, lsh or slb)");
}

void validate(const ExperimentConfig& config) {
  if (config.methods.empty()) throw ConfigError("config: method list is empty");
  for (Method m : config.methods) {
    const bool ok = m == Method::kMlStc
                        ? !config.layer_rates.empty()
                        : (!config.rate_grid.empty() ||
                           (m == Method::kStc && !config.lambda_grid.empty()));
    if (!ok) {
      throw ConfigError("config: method " + method_name(m) + " has no rate points");
    }
  }
  for (double r : config.rate_grid) {
    if (!(r > 0.0)) throw ConfigError("config: rates must be positive");
  }
  for (double r : config.layer_rates) {
    if (!(r > 0.0)) throw ConfigError("config: layer rates must be positive");
  }
  for (double l : config.lambda_grid) {
    if (!(l >= 0.0)) throw ConfigError("config: thresholds must be non-negative");
  }
}

namespace {

std::string gist_split_name(data::GistSplit s) {
  return s == data::GistSplit::kLearnBase ? "learn-base" : "base-learn";
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  ExperimentConfig c;
  try {
    const json j = json::parse(text);
    if (j.contains("source")) {
      const json& s = j.at("source");
      c.source.kind = s.value("kind", c.source.kind);
      c.source.synthetic.n = s.value("n", c.source.synthetic.n);
      c.source.synthetic.count = s.value("count", c.source.synthetic.count);
      c.source.synthetic.test_count = s.value("test_count", c.source.synthetic.test_count);
      c.source.synthetic.rho = s.value("rho", c.source.synthetic.rho);
      c.source.mnist_dir = s.value("mnist_dir", c.source.mnist_dir);
      c.source.train_path = s.value("train_path", c.source.train_path);
      c.source.test_path = s.value("test_path", c.source.test_path);
      c.source.max_train = s.value("max_train", c.source.max_train);
      c.source.max_test = s.value("max_test", c.source.max_test);
      const std::string split = s.value("gist_split", std::string("learn-base"));
      if (split != "learn-base" && split != "base-learn") {
        throw ConfigError("config: gist_split must be \"learn-base\" or \"base-learn\"");
      }
      c.source.gist_split =
          split == "learn-base" ? data::GistSplit::kLearnBase : data::GistSplit::kBaseLearn;
    }
    for (const auto& m : j.value("methods", std::vector<std::string>{})) {
      c.methods.push_back(parse_method(m));
    }
    c.rate_grid = j.value("rate_grid", c.rate_grid);
    c.lambda_grid = j.value("lambda_grid", c.lambda_grid);
    c.layer_rates = j.value("layer_rates", c.layer_rates);
    if (j.contains("layer_rate") || j.contains("layers")) {
      const double rate = j.value("layer_rate", 0.25);
      const int layers = j.value("layers", 1);
      if (layers < 1) throw ConfigError("config: layers must be >= 1");
      c.layer_rates.assign(static_cast<std::size_t>(layers), rate);
    }
    c.seed = j.value("seed", c.seed);
    c.source.synthetic.seed = c.seed;
    c.output = j.value("output", c.output);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["source"] = {
      {"kind", c.source.kind},
      {"n", c.source.synthetic.n},
      {"count", c.source.synthetic.count},
      {"test_count", c.source.synthetic.test_count},
      {"rho", c.source.synthetic.rho},
      {"mnist_dir", c.source.mnist_dir},
      {"train_path", c.source.train_path},
      {"test_path", c.source.test_path},
      {"max_train", c.source.max_train},
      {"max_test", c.source.max_test},
      {"gist_split", gist_split_name(c.source.gist_split)},
  };
  std::vector<std::string> methods;
  for (Method m : c.methods) methods.push_back(method_name(m));
  j["methods"] = methods;
  j["rate_grid"] = c.rate_grid;
  j["lambda_grid"] = c.lambda_grid;
  j["layer_rates"] = c.layer_rates;
  j["seed"] = c.seed;
  j["output"] = c.output;
  if (c.source.kind == "mnist") j["notes"] = "MNIST pixels scaled to [0, 1]";
  return j.dump(2);
}

data::Dataset load_source(const SourceConfig& s) {
  auto cap = [](std::size_t v) -> std::optional<std::size_t> {
    return v == 0 ? std::nullopt : std::optional<std::size_t>(v);
  };
  if (s.kind == "iid" || s.kind == "ar1") {
    data::SyntheticSpec spec = s.synthetic;
    spec.kind = s.kind == "iid" ? data::SourceKind::kIid : data::SourceKind::kAr1;
    return data::generate(spec);
  }
  if (s.kind == "mnist") {
    if (s.mnist_dir.empty()) throw ConfigError("source mnist: --mnist-dir is required");
    return data::load_mnist(s.mnist_dir, cap(s.max_train), cap(s.max_test));
  }
  if (s.kind == "gist") {
    if (s.train_path.empty() || s.test_path.empty()) {
      throw ConfigError("source gist: learn and base fvecs paths are required");
    }
    return data::load_gist(s.train_path, s.test_path, s.gist_split,
                           s.max_train ? s.max_train : 50000, s.max_test ? s.max_test : 10000);
  }
  if (s.kind == "fvecs") {
    if (s.train_path.empty()) throw ConfigError("source fvecs: --train is required");
    data::Dataset d;
    d.train = data::load_fvecs(s.train_path, cap(s.max_train));
    d.test = s.test_path.empty() ? d.train : data::load_fvecs(s.test_path, cap(s.max_test));
    if (d.train.rows() != d.test.rows()) throw DataError("fvecs: train/test dimensions differ");
    d.name = std::filesystem::path(s.train_path).stem().string();
    return d;
  }
  throw ConfigError("unknown source kind \"" + s.kind + "\"");
}

namespace {

template <typename F>
auto in_cell(const std::string& method, double rate, F&& body) {
  const std::string where = "[" + method + " @ " + std::to_string(rate) + "] ";
  try {
    return body();
  } catch (const InfeasibleRateError& e) {
    throw InfeasibleRateError(where + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(where + e.what());
  } catch (const DegenerateDataError& e) {
    throw DegenerateDataError(where + e.what());
  } catch (const DataError& e) {
    throw DataError(where + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(where + e.what());
  } catch (const DomainError& e) {
    throw DomainError(where + e.what());
  }
}

RDPoint stc_point(const SourceModel& source, const data::Dataset& d, double lambda,
                  std::uint64_t seed) {
  const LayerParams layer = make_layer(source, lambda, true);
  RDPoint p;
  p.method = "stc";
  p.dataset = d.name;
  p.layers_used = 1;
  p.lambda_schedule = {lambda};
  p.seed = seed;
  p.analytic_rate = layer.analytic_rate();
  p.rate = *p.analytic_rate;
  p.theoretical_distortion = layer.analytic_distortion();
  const CodeMatrix test_codes = encode_batch(layer, d.test);
  p.distortion = measure_distortion(d.test, decode_batch(layer, test_codes));
  p.empirical_rate = empirical_rate(test_codes);
  p.train_distortion =
      measure_distortion(d.train, decode_batch(layer, encode_batch(layer, d.train)));
  return p;
}

std::vector<double> model_spectrum(const ExperimentConfig& c, const SourceModel& fitted) {
  if (c.source.kind == "iid" || c.source.kind == "ar1") {
    data::SyntheticSpec spec = c.source.synthetic;
    spec.kind = c.source.kind == "iid" ? data::SourceKind::kIid : data::SourceKind::kAr1;
    if (spec.kind == data::SourceKind::kIid) {
      return std::vector<double>(static_cast<std::size_t>(spec.n), 1.0);
    }
    const SymmetricSpectrum s = eigh(data::source_covariance(spec));
    return {s.eigenvalues.data(), s.eigenvalues.data() + s.eigenvalues.size()};
  }
  return fitted.variances();
}

}  // namespace

std::vector<RDPoint> run_sweep(const ExperimentConfig& config) {
  validate(config);
  return run_sweep(config, load_source(config.source));
}

std::vector<RDPoint> run_sweep(const ExperimentConfig& config, const data::Dataset& d) {
  validate(config);
  if (d.train.rows() != d.test.rows()) throw DataError("dataset: train/test dimensions differ");
  const Index n = d.train.rows();
  std::vector<RDPoint> out;

  const bool needs_source =
      std::any_of(config.methods.begin(), config.methods.end(),
                  [](Method m) { return m != Method::kLsh; });
  SourceModel source;
  if (needs_source) {
    if (d.train.cols() < 2) throw DegenerateDataError("dataset: need at least 2 training vectors");
    source = fit_source(d.train);
    if (!(source.spectrum.eigenvalues.sum() > 0.0)) {
      throw DegenerateDataError("dataset: training data has zero covariance");
    }
  }

  for (Method m : config.methods) {
    const std::string name = method_name(m);
    switch (m) {
      case Method::kStc: {
        const std::vector<double> var = source.variances();
        for (double r : config.rate_grid) {
          out.push_back(in_cell(name, r, [&] {
            return stc_point(source, d, lambda_for_rate(var, r), config.seed);
          }));
        }
        for (double lambda : config.lambda_grid) {
          out.push_back(in_cell(name, lambda, [&] {
            return stc_point(source, d, lambda, config.seed);
          }));
        }
        break;
      }
      case Method::kMlStc: {
        const double first_rate = config.layer_rates.front();
        in_cell(name, first_rate, [&] {
          const MLModel model = train_ml(d.train, config.layer_rates, &source);
          const ProgressiveEval test = evaluate_progressive(model, d.test);
          const ProgressiveEval train = evaluate_progressive(model, d.train);
          std::vector<double> schedule;
          double empirical = 0.0;
          for (std::size_t k = 1; k <= model.num_layers(); ++k) {
            schedule.push_back(model.layers[k - 1].lambda);
            empirical += test.empirical_rate[k - 1];
            RDPoint p;
            p.method = name;
            p.dataset = d.name;
            p.layers_used = static_cast<int>(k);
            p.lambda_schedule = schedule;
            p.seed = config.seed;
            p.analytic_rate = model.cumulative_rate(k);
            p.rate = *p.analytic_rate;
            p.empirical_rate = empirical;
            p.distortion = test.distortion[k];
            p.train_distortion = train.distortion[k];
            out.push_back(std::move(p));
          }
          return 0;
        });
        break;
      }
      case Method::kPcaHash: {
        for (double r : config.rate_grid) {
          if (r > 1.0) continue;  // at most one bit per dimension
          out.push_back(in_cell(name, r, [&] {
            const auto k = static_cast<Index>(std::lround(r * static_cast<double>(n)));
            const baselines::PcaHashModel model = baselines::train_pca_hash(source, k);
            RDPoint p;
            p.method = name;
            p.dataset = d.name;
            p.rate = model.rate();
            p.layers_used = 1;
            p.seed = config.seed;
            p.distortion = measure_distortion(d.test, decode(model, encode(model, d.test)));
            p.train_distortion =
                measure_distortion(d.train, decode(model, encode(model, d.train)));
            return p;
          }));
        }
        break;
      }
      case Method::kLsh: {
        for (double r : config.rate_grid) {
          out.push_back(in_cell(name, r, [&] {
            const auto k = std::max<Index>(1, std::lround(r * static_cast<double>(n)));
            const baselines::LshModel model = baselines::train_lsh(d.train, k, config.seed);
            RDPoint p;
            p.method = name;
            p.dataset = d.name;
            p.rate = model.rate();
            p.layers_used = 1;
            p.seed = config.seed;
            p.distortion = measure_distortion(d.test, decode(model, encode(model, d.test)));
            p.train_distortion =
                measure_distortion(d.train, decode(model, encode(model, d.train)));
            return p;
          }));
        }
        break;
      }
      case Method::kSlb: {
        const bool synthetic = config.source.kind == "iid" || config.source.kind == "ar1";
        const std::vector<double> var = model_spectrum(config, source);
        for (RDPoint p : slb_curve(var, config.rate_grid)) {
          p.method = synthetic ? "slb" : "slb-gaussian";
          p.dataset = d.name;
          p.seed = config.seed;
          out.push_back(std::move(p));
        }
        break;
      }
    }
  }

  std::stable_sort(out.begin(), out.end(), [](const RDPoint& a, const RDPoint& b) {
    return std::tie(a.method, a.rate, a.layers_used) < std::tie(b.method, b.rate, b.layers_used);
  });
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

}  // namespace

std::string to_csv(std::span<const RDPoint> points) {
  std::ostringstream s;
  s << "method,dataset,rate,distortion,layers_used,lambda_schedule,seed,"
       "analytic_rate,empirical_rate,theoretical_distortion,train_distortion\n";
  for (const RDPoint& p : points) {
    std::string schedule;
    for (std::size_t i = 0; i < p.lambda_schedule.size(); ++i) {
      if (i) schedule += ';';
      schedule += fmt(p.lambda_schedule[i]);
    }
    s << p.method << ',' << p.dataset << ',' << fmt(p.rate) << ',' << fmt(p.distortion) << ','
      << p.layers_used << ',' << schedule << ',' << p.seed << ',' << fmt(p.analytic_rate) << ','
      << fmt(p.empirical_rate) << ',' << fmt(p.theoretical_distortion) << ','
      << fmt(p.train_distortion) << '\n';
  }
  return s.str();
}

void write_results(const ExperimentConfig& config, std::span<const RDPoint> points) {
  if (config.output.empty()) throw ConfigError("no output path given");
  {
    std::ofstream out(config.output, std::ios::binary);
    if (!out) throw DataError("cannot open " + config.output + " for writing");
    out << to_csv(points);
  }
  std::ofstream side(config.output + ".json", std::ios::binary);
  if (!side) throw DataError("cannot open " + config.output + ".json for writing");
  side << config_to_json(config) << '\n';
}

std::vector<AllocationRow> allocation_report(std::span<const double> variances, double lambda,
                                             double target_distortion) {
  const std::vector<DimAllocation> stc = single_layer_allocation(variances, lambda);
  const WaterfillSolution wf = waterfill(variances, target_distortion);
  std::vector<AllocationRow> rows(variances.size());
  for (std::size_t i = 0; i < variances.size(); ++i) {
    rows[i] = {variances[i], stc[i].rate, stc[i].distortion, wf.per_dim_rate[i],
               wf.per_dim_distortion[i]};
  }
  return rows;
}

std::string allocation_csv(std::span<const AllocationRow> rows) {
  std::ostringstream s;
  s << "dim,variance,stc_rate,stc_distortion,waterfill_rate,waterfill_distortion\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const AllocationRow& r = rows[i];
    s << i << ',' << fmt(r.variance) << ',' << fmt(r.stc_rate) << ',' << fmt(r.stc_distortion)
      << ',' << fmt(r.waterfill_rate) << ',' << fmt(r.waterfill_distortion) << '\n';
  }
  return s.str();
}

}  // namespace mlstc::harness
