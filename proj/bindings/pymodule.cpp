// Python face of the toolkit: thin converters around the exact-arithmetic
// core.  Integers cross the boundary as native python ints (arbitrary
// precision), rationals as "p/q" strings, matrices as row-major nested
// lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "latsnf/errors.hpp"
#include "latsnf/gaussian.hpp"
#include "latsnf/lattice.hpp"
#include "latsnf/linalg.hpp"
#include "latsnf/matrix.hpp"
#include "latsnf/numeric.hpp"
#include "latsnf/qr.hpp"
#include "latsnf/reduction.hpp"
#include "latsnf/rng.hpp"
#include "latsnf/sis.hpp"
#include "latsnf/snf.hpp"

namespace py = pybind11;
using namespace latsnf;

namespace {

py::int_ to_py(const Int& v) {
    return py::reinterpret_steal<py::int_>(
        PyLong_FromString(v.get_str().c_str(), nullptr, 10));
}

Int to_int(py::handle h) { return Int(py::str(h).cast<std::string>()); }

Rat to_rat(py::handle h) {
    return parse_rat(py::str(h).cast<std::string>());
}

IntVec to_vec(py::handle seq) {
    IntVec v;
    for (py::handle item : seq.cast<py::sequence>()) v.push_back(to_int(item));
    return v;
}

py::list vec_to_py(const IntVec& v) {
    py::list out;
    for (const Int& c : v) out.append(to_py(c));
    return out;
}

IntMatrix to_matrix(py::handle rows_obj) {
    const py::sequence rows = rows_obj.cast<py::sequence>();
    const std::size_t r = rows.size();
    if (r == 0) throw ContractError("matrix needs at least one row");
    const py::sequence first = rows[0].cast<py::sequence>();
    const std::size_t c = first.size();
    IntMatrix A(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        const py::sequence row = rows[i].cast<py::sequence>();
        if (row.size() != c)
            throw ContractError("matrix rows must have equal length");
        for (std::size_t j = 0; j < c; ++j) A(i, j) = to_int(row[j]);
    }
    return A;
}

py::list matrix_to_py(const IntMatrix& A) {
    py::list out;
    for (std::size_t i = 0; i < A.rows(); ++i) {
        py::list row;
        for (std::size_t j = 0; j < A.cols(); ++j) row.append(to_py(A(i, j)));
        out.append(row);
    }
    return out;
}

SisInstance inst_from_dict(const py::dict& d) {
    SisInstance inst;
    inst.N = to_int(d["N"]);
    inst.delta = to_rat(d["delta"]);
    inst.g = to_vec(d["g"]);
    inst.n = inst.g.size();
    inst.homogeneous = d.contains("homogeneous")
                           ? d["homogeneous"].cast<bool>()
                           : true;
    return inst;
}

py::dict inst_to_dict(const SisInstance& inst) {
    py::dict d;
    d["N"] = to_py(inst.N);
    d["delta"] = rat_to_string(inst.delta);
    d["g"] = vec_to_py(inst.g);
    d["homogeneous"] = inst.homogeneous;
    return d;
}

ReductionConfig config_from_kwargs(const std::string& delta,
                                   std::optional<double> phi,
                                   std::size_t trials, std::uint64_t seed,
                                   const std::string& oracle, double constant,
                                   long precision, std::size_t jobs) {
    ReductionConfig cfg;
    cfg.delta = parse_rat(delta);
    cfg.phi = phi;
    cfg.trial_budget = trials;
    cfg.seed = seed;
    if (oracle == "lll")
        cfg.oracle = make_lll_oracle();
    else if (oracle != "bruteforce")
        throw ContractError("oracle must be 'bruteforce' or 'lll'");
    cfg.constant = constant;
    cfg.precision_bits = mp_bitcnt_t(precision);
    cfg.jobs = jobs;
    return cfg;
}

py::dict trace_to_dict(const ReductionTrace& tr) {
    py::dict d;
    d["m"] = tr.m;
    d["N"] = to_py(tr.N);
    d["T"] = to_py(tr.T);
    d["epsilon"] = tr.epsilon;
    d["s"] = tr.s;
    d["phi"] = tr.phi;
    d["c"] = to_py(tr.c);
    d["sum_coeff"] = to_py(tr.sum_coeff);
    d["distance"] = tr.achieved_distance;
    d["distance_bound"] = tr.distance_bound;
    d["bound_ok"] = tr.bound_ok;
    d["degraded"] = tr.degraded;
    d["oracle_gamma"] = tr.oracle_gamma;
    return d;
}

}  // namespace

PYBIND11_MODULE(_latsnf, m) {
    m.doc() =
        "Exact lattice toolkit: normal-form reduction, coset maps, discrete "
        "Gaussians, short-solution instances, and the decoding drivers.";
    m.attr("__version__") = "1.0";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ContractError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const ParseError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const SnfShapeError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const CompositeModulusError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const Error& e) {
            PyErr_SetString(PyExc_RuntimeError, e.what());
        }
    });

    m.def(
        "hnf",
        [](py::handle B) {
            const HnfResult r = hnf(to_matrix(B));
            return py::make_tuple(matrix_to_py(r.H), matrix_to_py(r.U));
        },
        py::arg("basis"),
        "Column-style Hermite normal form: returns (H, U) with H = basis @ U, "
        "H upper triangular with positive diagonal, U unimodular.");

    m.def(
        "lll",
        [](py::handle B, const std::string& delta) {
            const LllResult r = lll(to_matrix(B), parse_rat(delta));
            return py::make_tuple(matrix_to_py(r.B), matrix_to_py(r.U));
        },
        py::arg("basis"), py::arg("delta") = "3/4",
        "Exact-arithmetic basis reduction: returns (B_reduced, U) with "
        "B_reduced = basis @ U.");

    m.def(
        "snf_reduce",
        [](py::handle B, long a, long b, bool strict, long precision) {
            SnfReduceOptions opt;
            opt.a = a;
            opt.b = b;
            opt.strict = strict;
            const IntMatrix A = to_matrix(B);
            const QrFactor f = qr(lll(A).B, mp_bitcnt_t(precision));
            const SnfReduction red = reduce_to_snf(f.R, opt);
            py::dict d;
            d["N"] = to_py(red.snf.N);
            d["b"] = vec_to_py(red.snf.b);
            d["T"] = to_py(red.T);
            d["M"] = matrix_to_py(red.M);
            d["post"] = matrix_to_py(red.post);
            d["bound_certified"] = red.bound_certified;
            return d;
        },
        py::arg("basis"), py::arg("a") = 1, py::arg("b") = 2,
        py::arg("strict") = true, py::arg("precision") = 256,
        "Scale-and-normalize an integer basis to its systematic form; "
        "returns the prime modulus N, the free first-row entries b, the "
        "scale T, and the unimodular transforms.");

    m.def(
        "validate_snf",
        [](py::handle M) { validate_snf(to_matrix(M)); }, py::arg("matrix"),
        "Raises ValueError unless the matrix is a systematic normal form "
        "with a certified-prime corner.");

    m.def(
        "phi3",
        [](py::handle N, py::handle b, py::handle x) {
            const SnfBasis S(to_int(N), to_vec(b));
            const Phi3Result r = phi3(S, to_vec(x));
            return py::make_tuple(to_py(r.a), vec_to_py(r.y));
        },
        py::arg("N"), py::arg("b"), py::arg("x"),
        "The affine coset map: returns (a, y) with x + y in the lattice "
        "subgroup and a in [0, N).");

    m.def(
        "ln_contains",
        [](py::handle N, py::handle b, py::handle x) {
            return ln_contains(SnfBasis(to_int(N), to_vec(b)), to_vec(x));
        },
        py::arg("N"), py::arg("b"), py::arg("x"));

    m.def(
        "sample_gaussian",
        [](py::handle N, std::size_t n, double s,
           std::optional<std::vector<double>> center, std::size_t count,
           std::uint64_t seed) {
            const Int Ni = to_int(N);
            std::vector<double> c =
                center.value_or(std::vector<double>(n, 0.0));
            const RngStream root(seed);
            py::list out;
            for (std::size_t i = 0; i < count; ++i) {
                RngStream rng = root.derive(1, i);
                out.append(vec_to_py(sample_dgauss_fn(Ni, n, s, c, rng)));
            }
            return out;
        },
        py::arg("N"), py::arg("n"), py::arg("s"), py::arg("center") = py::none(),
        py::arg("count") = 1, py::arg("seed") = 0,
        "Discrete Gaussian samples reduced into [0, N)^n; deterministic per "
        "seed.");

    m.def(
        "smoothing_parameter",
        [](py::handle B, double eps, double rel_tol) {
            const SmoothingResult r =
                smoothing_parameter(LatticeBasis(to_matrix(B)), eps, rel_tol);
            py::dict d;
            d["epsilon"] = r.epsilon;
            d["s_star"] = r.s_star;
            d["dual_sum"] = r.dual_sum;
            d["truncation_error_bound"] = r.truncation_error_bound;
            return d;
        },
        py::arg("basis"), py::arg("epsilon"), py::arg("rel_tol") = 1e-6,
        "Exact-dual bisection for the smoothing width.");

    m.def(
        "smoothing_estimate",
        [](py::handle B, double eps) {
            return smoothing_upper_estimate(to_matrix(B), eps);
        },
        py::arg("basis"), py::arg("epsilon"),
        "Closed-form upper estimate for a reduced basis.");

    m.def(
        "sis_gen",
        [](py::handle N, const std::string& delta, std::uint64_t seed,
           bool homogeneous) {
            RngStream rng(seed);
            return inst_to_dict(gen_random_instance(to_int(N),
                                                    parse_rat(delta), rng,
                                                    homogeneous));
        },
        py::arg("N"), py::arg("delta"), py::arg("seed") = 0,
        py::arg("homogeneous") = true,
        "Random short-solution instance at the dimension implied by the "
        "modulus and exponent.");

    m.def(
        "sis_solve",
        [](const py::dict& inst_dict, py::handle bound,
           const std::string& solver,
           std::uint64_t seed) -> py::object {
            const SisInstance inst = inst_from_dict(inst_dict);
            const Int B = bound.is_none() ? oracle_bound(inst) : to_int(bound);
            std::optional<SisSolution> sol;
            if (solver == "bruteforce") {
                sol = solve_bruteforce(inst, B);
            } else if (solver == "random") {
                RngStream rng(seed);
                sol = solve_bruteforce_random(inst, B, rng);
            } else if (solver == "lll") {
                sol = solve_lll(inst);
            } else {
                throw ContractError("solver must be bruteforce, random, or lll");
            }
            if (!sol) return py::none();
            return vec_to_py(sol->h);
        },
        py::arg("instance"), py::arg("bound") = py::none(),
        py::arg("solver") = "bruteforce", py::arg("seed") = 0,
        "Short nonzero coefficients for the instance, or None when the "
        "search space is certified empty at the bound.");

    m.def(
        "sis_verify",
        [](const py::dict& inst_dict, py::handle h, py::handle bound) {
            const SisInstance inst = inst_from_dict(inst_dict);
            SisSolution sol;
            sol.h = to_vec(h);
            const SisVerdict v = bound.is_none()
                                     ? verify(inst, sol)
                                     : verify(inst, sol, to_int(bound));
            py::dict d;
            d["accepted"] = v.accepted;
            d["reason"] = v.reason;
            d["gamma"] = v.gamma;
            d["max_abs"] = to_py(v.max_abs);
            return d;
        },
        py::arg("instance"), py::arg("h"), py::arg("bound") = py::none());

    m.def(
        "gdd_reduce",
        [](py::handle B, py::handle target, const std::string& delta,
           std::optional<double> phi, std::size_t trials, std::uint64_t seed,
           const std::string& oracle, double constant, long precision,
           std::size_t jobs) {
            GddInstance inst;
            inst.B = to_matrix(B);
            inst.v = to_vec(target);
            const GddRun run = gdd_reduce_run(
                inst, config_from_kwargs(delta, phi, trials, seed, oracle,
                                         constant, precision, jobs));
            py::dict d;
            d["x_out"] =
                run.x_out ? py::object(vec_to_py(*run.x_out)) : py::none();
            d["trials"] = run.trials_used;
            py::dict tally;
            for (const auto& [k, v] : run.fail_tally) tally[py::str(k)] = v;
            d["fail"] = tally;
            if (run.x_out) d["trace"] = trace_to_dict(run.success_trace);
            return d;
        },
        py::arg("basis"), py::arg("target"), py::arg("delta") = "1",
        py::arg("phi") = py::none(), py::arg("trials") = 64,
        py::arg("seed") = 0, py::arg("oracle") = "bruteforce",
        py::arg("constant") = 8.0, py::arg("precision") = 256,
        py::arg("jobs") = 1,
        "Amplified decoding driver; x_out is None when every trial failed, "
        "with the tally in 'fail'.");

    m.def(
        "sivp_reduce",
        [](py::handle B, const std::string& delta, std::optional<double> phi,
           std::size_t trials, std::uint64_t seed, const std::string& oracle,
           double constant, long precision, std::size_t jobs) {
            const SivpResult r = sivp_reduce(
                to_matrix(B), config_from_kwargs(delta, phi, trials, seed,
                                                 oracle, constant, precision,
                                                 jobs));
            py::dict d;
            py::list vecs, norms;
            for (const IntVec& v : r.vectors) vecs.append(vec_to_py(v));
            for (const Int& nv : r.norms2) norms.append(to_py(nv));
            d["vectors"] = vecs;
            d["norms2"] = norms;
            d["bound"] = r.bound;
            d["all_within_bound"] = r.all_within_bound;
            d["trials"] = r.trials_used;
            py::dict tally;
            for (const auto& [k, v] : r.fail_tally) tally[py::str(k)] = v;
            d["fail"] = tally;
            return d;
        },
        py::arg("basis"), py::arg("delta") = "1", py::arg("phi") = py::none(),
        py::arg("trials") = 64, py::arg("seed") = 0,
        py::arg("oracle") = "bruteforce", py::arg("constant") = 8.0,
        py::arg("precision") = 256, py::arg("jobs") = 1,
        "Collects a full set of linearly independent short vectors; raises "
        "RuntimeError when the trial budget runs out first.");
}
