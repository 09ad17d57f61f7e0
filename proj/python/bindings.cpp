#include "seer/cli/pipeline.hpp"
#include "seer/criteria.hpp"
#include "seer/errors.hpp"
#include "seer/linalg.hpp"
#include "seer/pls.hpp"
#include "seer/seer.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace seer;

namespace {

Weights weights_or_uniform(const std::optional<VectorXd>& p, Index n) {
    return p ? Weights(*p) : Weights::uniform(n);
}

MetricKind metric_kind(const std::string& s) {
    try {
        return metric_kind_from_string(s);
    } catch (const std::exception&) {
        throw ConfigError("unknown metric '" + s + "'");
    }
}

py::dict outcome_dict(const cli::RunOutcome& o) {
    const auto& mc = o.fit.components;
    py::dict d;
    d["output_dir"] = o.output_dir;
    d["algorithm"] = cli::to_string(o.fit.algorithm);
    d["criterion"] = mc.criterion;
    d["converged"] = mc.converged;
    d["iterations"] = mc.iterations;
    d["ids"] = o.prepared.ids;
    py::dict groups;
    for (std::size_t r = 0; r < o.fit.predictors.size(); ++r) groups[py::str(o.fit.predictors[r].name)] = mc.groups[r];
    d["groups"] = groups;
    d["dependent"] = mc.dependent;
    return d;
}

} // namespace

PYBIND11_MODULE(_seer, m) {
    m.doc() = "Structural equation exploratory regression";

    // Translators run newest first, so the specific kinds shadow the base.
    auto& base = py::register_exception<Error>(m, "SeerError", PyExc_RuntimeError);
    py::register_exception<ConstantColumn>(m, "ConstantColumn", base.ptr());
    py::register_exception<SingularBasis>(m, "SingularBasis", base.ptr());
    py::register_exception<NotSymmetric>(m, "NotSymmetric", base.ptr());
    py::register_exception<NotPositiveDefinite>(m, "NotPositiveDefinite", base.ptr());
    py::register_exception<InvalidWeights>(m, "InvalidWeights", base.ptr());
    py::register_exception<DegenerateComponent>(m, "DegenerateComponent", base.ptr());
    py::register_exception<NullCovariance>(m, "NullCovariance", base.ptr());
    py::register_exception<InsufficientDof>(m, "InsufficientDof", base.ptr());
    py::register_exception<MissingVariable>(m, "MissingVariable", base.ptr());
    py::register_exception<NonNumericCell>(m, "NonNumericCell", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<UnknownComponent>(m, "UnknownComponent", base.ptr());

    py::class_<Weights>(m, "Weights")
        .def(py::init<VectorXd>(), py::arg("p"))
        .def_static("uniform", &Weights::uniform, py::arg("n"))
        .def_property_readonly("p", &Weights::p)
        .def("__len__", &Weights::size);

    m.def(
        "standardize",
        [](const MatrixXd& x, const Weights& w, bool scale) {
            return standardize(x, w, scale ? ScaleMode::center_scale : ScaleMode::center_only).x;
        },
        py::arg("x"), py::arg("weights"), py::arg("scale") = true);

    py::class_<Metric>(m, "Metric")
        .def(py::init([](const MatrixXd& mat) { return Metric(mat); }), py::arg("matrix"))
        .def_static("identity", &Metric::identity, py::arg("j"))
        .def_property_readonly("matrix", &Metric::matrix)
        .def_property_readonly("kind", [](const Metric& mt) { return std::string(to_string(mt.kind())); });

    m.def(
        "make_metric",
        [](const std::string& kind, const MatrixXd& x, const Weights& w, const Blocks& blocks) {
            return make_metric(metric_kind(kind), x, w, blocks);
        },
        py::arg("kind"), py::arg("x"), py::arg("weights"), py::arg("blocks") = Blocks{});

    m.def(
        "max_gen_eig",
        [](const MatrixXd& s, const Metric& mt, Index k) {
            std::vector<std::pair<double, VectorXd>> out;
            for (auto& e : max_gen_eig(s, mt, k)) out.emplace_back(e.value, std::move(e.vector));
            return out;
        },
        py::arg("s"), py::arg("metric"), py::arg("k") = 1);

    py::class_<Component>(m, "Component")
        .def_readonly("score", &Component::score)
        .def_readonly("loading", &Component::loading)
        .def_readonly("group", &Component::group_id)
        .def_readonly("rank", &Component::rank)
        .def_readonly("eigenvalue", &Component::eigenvalue)
        .def("__repr__", [](const Component& c) {
            return "<Component " + c.group_id + "^" + std::to_string(c.rank) + " value=" + std::to_string(c.eigenvalue) +
                   ">";
        });

    m.def(
        "triplet_pca",
        [](const MatrixXd& x, const Metric& mt, const Weights& w, Index k) {
            std::vector<std::pair<double, VectorXd>> out;
            for (auto& c : triplet_pca(x, mt, w, k).components) out.emplace_back(c.eigenvalue, std::move(c.score));
            return out;
        },
        py::arg("x"), py::arg("metric"), py::arg("weights"), py::arg("k"));

    m.def(
        "pls1",
        [](const MatrixXd& x, const Metric& mt, const VectorXd& y, const Weights& w, Index k) {
            return pls1(x, mt, y, w, k).components;
        },
        py::arg("x"), py::arg("metric"), py::arg("y"), py::arg("weights"), py::arg("k") = 1);

    m.def(
        "q3_rank1",
        [](const MatrixXd& x, const Metric& mx, const MatrixXd& y, const Metric& ny, const Weights& w) {
            auto r = q3_rank1(x, mx, y, ny, w);
            return py::make_tuple(r.f, r.g, r.eta);
        },
        py::arg("x"), py::arg("x_metric"), py::arg("y"), py::arg("y_metric"), py::arg("weights"));

    m.def(
        "ln_pls2",
        [](const MatrixXd& x, const Metric& mx, const MatrixXd& y, const Metric& ny, Index kx, Index ky,
           const Weights& w, const std::string& nesting) {
            auto r = ln_pls2(x, mx, y, ny, kx, ky, w, "X", "Y", pls2_nesting_from_string(nesting));
            return py::make_tuple(r.f, r.g);
        },
        py::arg("x"), py::arg("x_metric"), py::arg("y"), py::arg("y_metric"), py::arg("kx"), py::arg("ky"),
        py::arg("weights"), py::arg("nesting") = "conditioned");

    m.def(
        "c5",
        [](const MatrixXd& y, const MatrixXd& n, const MatrixXd& f, const Weights& w) { return c5(y, n, f, w); },
        py::arg("y"), py::arg("n_weights"), py::arg("components"), py::arg("weights"));
    m.def(
        "c6", [](const VectorXd& g, const MatrixXd& f, const Weights& w) { return c6(g, f, w); }, py::arg("g"),
        py::arg("components"), py::arg("weights"));

    py::class_<CriterionContext>(m, "CriterionContext")
        .def(py::init<MatrixXd, const MatrixXd&, const MatrixXd&, const Weights&>(), py::arg("y"),
             py::arg("n_weights"), py::arg("z"), py::arg("weights"))
        .def("criterion", &CriterionContext::criterion, py::arg("f"))
        .def("beta_gamma", [](const CriterionContext& ctx, const VectorXd& f) {
            const auto bg = beta_gamma(f, ctx);
            return py::make_tuple(bg.beta, bg.gamma);
        });

    py::class_<ConvergenceOptions>(m, "ConvergenceOptions")
        .def(py::init<>())
        .def_readwrite("component_tol", &ConvergenceOptions::component_tol)
        .def_readwrite("inner_tol", &ConvergenceOptions::inner_tol)
        .def_readwrite("max_outer", &ConvergenceOptions::max_outer)
        .def_readwrite("max_inner", &ConvergenceOptions::max_inner)
        .def_readwrite("safeguard", &ConvergenceOptions::safeguard);

    py::class_<Block>(m, "Block")
        .def(py::init([](std::string name, MatrixXd x, std::optional<Metric> metric) {
                 Metric mt = metric ? *metric : Metric::identity(x.cols());
                 return Block{std::move(name), std::move(x), std::move(mt)};
             }),
             py::arg("name"), py::arg("x"), py::arg("metric") = std::nullopt)
        .def_readonly("name", &Block::name)
        .def_readonly("x", &Block::x)
        .def_readonly("metric", &Block::metric);

    py::class_<A0Run>(m, "A0Run")
        .def_readonly("group", &A0Run::group)
        .def_readonly("rank", &A0Run::rank)
        .def_readonly("iterations", &A0Run::iterations)
        .def_readonly("converged", &A0Run::converged)
        .def_readonly("monotone", &A0Run::monotone);

    py::class_<ModelComponents>(m, "ModelComponents")
        .def_readonly("group_names", &ModelComponents::group_names)
        .def_readonly("groups", &ModelComponents::groups)
        .def_readonly("dependent", &ModelComponents::dependent)
        .def_readonly("criterion_trace", &ModelComponents::criterion_trace)
        .def_readonly("converged", &ModelComponents::converged)
        .def_readonly("iterations", &ModelComponents::iterations)
        .def_readonly("criterion", &ModelComponents::criterion)
        .def_readonly("a0_runs", &ModelComponents::a0_runs)
        .def("predictor_scores", &ModelComponents::predictor_scores);

    auto model_of = [](const Block& dependent, const std::vector<Block>& predictors, const std::vector<Index>& counts,
                       Index l, const std::optional<VectorXd>& p, const ConvergenceOptions& opts) {
        return ThematicModel{dependent, predictors, counts, l, weights_or_uniform(p, dependent.x.rows()), opts};
    };

    m.def(
        "a2",
        [](const Block& dependent, const std::vector<Block>& predictors, const std::optional<VectorXd>& p,
           const ConvergenceOptions& opts) {
            return a2(dependent.x, dependent.metric, predictors, weights_or_uniform(p, dependent.x.rows()), opts);
        },
        py::arg("dependent"), py::arg("predictors"), py::arg("weights") = std::nullopt,
        py::arg("options") = ConvergenceOptions{});

    m.def(
        "b1",
        [](const Block& dependent, const std::vector<Block>& predictors, const std::optional<VectorXd>& p,
           const ConvergenceOptions& opts) {
            return b1(dependent.x, dependent.metric, predictors, weights_or_uniform(p, dependent.x.rows()), opts);
        },
        py::arg("dependent"), py::arg("predictors"), py::arg("weights") = std::nullopt,
        py::arg("options") = ConvergenceOptions{});

    m.def(
        "a3",
        [model_of](const Block& dependent, const std::vector<Block>& predictors, const std::vector<Index>& counts,
                   Index l, const std::optional<VectorXd>& p, const ConvergenceOptions& opts) {
            return a3(model_of(dependent, predictors, counts, l, p, opts));
        },
        py::arg("dependent"), py::arg("predictors"), py::arg("counts"), py::arg("dependent_count") = 0,
        py::arg("weights") = std::nullopt, py::arg("options") = ConvergenceOptions{});

    m.def(
        "b2",
        [model_of](const Block& dependent, const std::vector<Block>& predictors, const std::vector<Index>& counts,
                   Index l, const std::optional<VectorXd>& p, const ConvergenceOptions& opts) {
            return b2(model_of(dependent, predictors, counts, l, p, opts));
        },
        py::arg("dependent"), py::arg("predictors"), py::arg("counts"), py::arg("dependent_count") = 1,
        py::arg("weights") = std::nullopt, py::arg("options") = ConvergenceOptions{});

    m.def(
        "criterion_ratio",
        [](const ModelComponents& mc, const Block& dependent, Index group, const std::optional<VectorXd>& p) {
            return criterion_ratio(mc, dependent.x, dependent.metric.matrix(),
                                   weights_or_uniform(p, dependent.x.rows()), group);
        },
        py::arg("model"), py::arg("dependent"), py::arg("group"), py::arg("weights") = std::nullopt);

    m.def(
        "backward_select",
        [model_of](const Block& dependent, const std::vector<Block>& predictors, const std::vector<Index>& counts,
                   const std::string& omega, const std::vector<Index>& min_counts, const std::optional<VectorXd>& p,
                   const ConvergenceOptions& opts) {
            const ThematicModel model = model_of(dependent, predictors, counts, 0, p, opts);
            const auto sel = backward_select(model, a3(model), omega_kind_from_string(omega), {min_counts, std::nullopt});
            py::list steps;
            for (const auto& s : sel.steps)
                steps.append(py::dict(py::arg("step") = s.step, py::arg("group") = s.group,
                                      py::arg("removed_rank") = s.removed_rank, py::arg("scores") = s.scores,
                                      py::arg("refit_criterion") = s.refit_criterion));
            return py::make_tuple(steps, sel.final_counts, sel.final_model);
        },
        py::arg("dependent"), py::arg("predictors"), py::arg("counts"), py::arg("omega") = "inv_lambda1",
        py::arg("min_counts") = std::vector<Index>{}, py::arg("weights") = std::nullopt,
        py::arg("options") = ConvergenceOptions{});

    m.def(
        "run_config",
        [](const std::string& config, std::optional<std::string> out, std::optional<std::string> algorithm,
           const std::vector<std::string>& planes, bool all_variables) {
            cli::RunRequest req;
            req.config_path = config;
            req.out_dir = std::move(out);
            if (algorithm) req.algorithm = cli::algorithm_from_string(*algorithm);
            for (const auto& p : planes) req.outputs.planes.push_back(cli::parse_plane(p));
            req.outputs.all_variables = all_variables;
            return outcome_dict(cli::execute(req));
        },
        py::arg("config"), py::arg("out") = std::nullopt, py::arg("algorithm") = std::nullopt,
        py::arg("planes") = std::vector<std::string>{}, py::arg("all_variables") = false);
}
