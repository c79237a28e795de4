#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "apbias/asymptotics.hpp"
#include "apbias/classic.hpp"
#include "apbias/counting.hpp"
#include "apbias/errors.hpp"
#include "apbias/lab.hpp"
#include "apbias/numerics.hpp"
#include "apbias/parallel.hpp"
#include "apbias/primality.hpp"
#include "apbias/selftest.hpp"
#include "apbias/sieve.hpp"
#include "apbias/special.hpp"

#include <memory>

namespace py = pybind11;
using namespace apbias;

namespace {

// Sieve + lab bundle so python callers get the whole pipeline per modulus.
struct PyLab {
    std::shared_ptr<const SieveTable> sieve;
    std::unique_ptr<ConstantsLab> lab;

    PyLab(std::uint64_t q, std::uint64_t p0, std::uint64_t p1, int workers) {
        SieveOptions so;
        so.workers = workers;
        sieve = std::make_shared<const SieveTable>(
            SieveTable::build(std::max<std::uint64_t>(p1, 1'000'000), 0, so));
        ConstantsLab::Options lo;
        lo.P0 = p0;
        lo.P1 = p1;
        lo.workers = workers;
        lab = std::make_unique<ConstantsLab>(q, sieve, lo);
    }
};

py::dict sig_map_to_dict(const std::map<ResidueSignature, std::uint64_t>& m) {
    py::dict out;
    for (auto& [sig, cnt] : m) out[py::str(sig.str())] = cnt;
    return out;
}

} // namespace

PYBIND11_MODULE(_apbias, m) {
    m.doc() = "Bias constants, exact k-almost-prime counts and Euler-product limits "
              "for prime factors in arithmetic progressions.";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);

    m.def("euler_gamma", &euler_gamma);
    m.def("mertens_B", &mertens_B);
    m.def("prime_zeta", &prime_zeta, py::arg("s"));
    m.def("riemann_zeta", &riemann_zeta, py::arg("s"));
    m.def("digamma_rational", &digamma_rational, py::arg("num"), py::arg("den"));
    m.def("gamma_complex", &gamma_complex, py::arg("x"));
    m.def("least_prime", &least_prime, py::arg("q"), py::arg("a"));
    m.def("is_prime", &is_prime_u64, py::arg("n"));

    py::class_<SieveTable, std::shared_ptr<SieveTable>>(m, "Sieve")
        .def(py::init([](std::uint64_t limit, std::uint64_t q, int workers) {
                 SieveOptions o;
                 o.workers = workers;
                 return std::make_shared<SieveTable>(SieveTable::build(limit, q, o));
             }),
             py::arg("limit"), py::arg("attach_modulus") = 0, py::arg("workers") = 1)
        .def_property_readonly("limit", &SieveTable::limit)
        .def_property_readonly("attached_modulus", &SieveTable::attached_modulus)
        .def("is_prime", &SieveTable::is_prime, py::arg("n"))
        .def("prime_count", &SieveTable::prime_count, py::arg("y"))
        .def("prime_count_in_class", &SieveTable::prime_count_in_class, py::arg("y"),
             py::arg("q"), py::arg("r"))
        .def("reciprocal_sum_in_class", &SieveTable::reciprocal_sum_in_class, py::arg("cutoff"),
             py::arg("q"), py::arg("r"))
        .def("checksum", &SieveTable::checksum);

    py::class_<PyLab>(m, "ConstantsLab")
        .def(py::init<std::uint64_t, std::uint64_t, std::uint64_t, int>(), py::arg("q"),
             py::arg("p0") = 1'000'000, py::arg("p1") = 10'000'000, py::arg("workers") = 1)
        .def_property_readonly("q", [](const PyLab& s) { return s.lab->q(); })
        .def_property_readonly("phi", [](const PyLab& s) { return s.lab->table().phi(); })
        .def("bias_constant_C",
             [](const PyLab& s, std::uint64_t a) { return s.lab->bias_constant_C(a); },
             py::arg("a"))
        .def("mertens_M", [](const PyLab& s, std::uint64_t a) { return s.lab->mertens_M(a); },
             py::arg("a"))
        .def("constants",
             [](const PyLab& s) {
                 BiasConstants bc = s.lab->bias_constants();
                 py::dict c, mm;
                 for (std::size_t i = 0; i < bc.classes.size(); ++i) {
                     c[py::int_(bc.classes[i])] = bc.C[i];
                     mm[py::int_(bc.classes[i])] = bc.M[i];
                 }
                 py::dict out;
                 out["q"] = bc.q;
                 out["gamma"] = bc.gamma;
                 out["B"] = bc.B;
                 out["sum_recip_q"] = bc.sum_recip_q;
                 out["C"] = c;
                 out["M"] = mm;
                 out["P0"] = bc.P0;
                 out["P1"] = bc.P1;
                 out["err"] = bc.err_estimate;
                 return out;
             })
        .def("l_one",
             [](const PyLab& s, std::size_t chi_index) { return s.lab->l_one(chi_index); },
             py::arg("chi_index"))
        .def("log_l_one",
             [](const PyLab& s, std::size_t chi_index) {
                 const LValue& lv = s.lab->log_l_one(chi_index);
                 py::dict out;
                 out["value"] = lv.value;
                 out["log"] = lv.log_value;
                 out["winding"] = lv.winding;
                 out["err_bound"] = lv.err_bound;
                 return out;
             },
             py::arg("chi_index"))
        .def("euler_g",
             [](const PyLab& s, std::complex<double> z) {
                 EulerProductValue v = s.lab->euler_g(z);
                 return py::make_tuple(v.value, v.tail_bound);
             },
             py::arg("z"))
        .def("euler_h",
             [](const PyLab& s, std::uint64_t a, std::complex<double> z) {
                 EulerProductValue v = s.lab->euler_h(a, z);
                 return py::make_tuple(v.value, v.tail_bound);
             },
             py::arg("a"), py::arg("z"))
        .def("limit_ratio_same",
             [](const PyLab& s, std::uint64_t a, double A) {
                 LimitRatio r = s.lab->limit_ratio_same(a, A);
                 return py::make_tuple(r.value, r.tail_bound);
             },
             py::arg("a"), py::arg("A"))
        .def("limit_ratio_general",
             [](const PyLab& s, const std::string& sig, const std::vector<double>& e, double A) {
                 LimitRatio r =
                     s.lab->limit_ratio_general(parse_signature(sig, s.lab->q()), e, A);
                 return py::make_tuple(r.value, r.tail_bound);
             },
             py::arg("sig"), py::arg("e"), py::arg("A"))
        .def("predict_ratio_fixed_k",
             [](const PyLab& s, std::uint64_t x, const std::string& sig) {
                 return predict_ratio_fixed_k(x, parse_signature(sig, s.lab->q()), *s.lab);
             },
             py::arg("x"), py::arg("sig"))
        .def("character_table_json", [](const PyLab& s) { return s.lab->table().to_json(); });

    m.def(
        "count_S_k",
        [](std::uint64_t x, int k, std::uint64_t q, int workers) {
            auto sieve = SieveTable::build(required_sieve_limit(x, k, q), q,
                                           SieveOptions{std::uint64_t(1) << 20, workers,
                                                        std::uint64_t(2) << 30, ""});
            return count_S_k(sieve, x, k, q, nullptr, workers);
        },
        py::arg("x"), py::arg("k"), py::arg("q"), py::arg("workers") = 1);
    m.def(
        "count_M_k",
        [](std::uint64_t x, const std::string& sig_text, std::uint64_t q, int workers) {
            ResidueSignature sig = parse_signature(sig_text, q);
            auto sieve = SieveTable::build(required_sieve_limit(x, int(sig.k_total()), q), q,
                                           SieveOptions{std::uint64_t(1) << 20, workers,
                                                        std::uint64_t(2) << 30, ""});
            return count_M_k(sieve, x, sig, nullptr, workers);
        },
        py::arg("x"), py::arg("sig"), py::arg("q"), py::arg("workers") = 1);
    m.def(
        "count_all_signatures",
        [](std::uint64_t x, int k, std::uint64_t q, int workers) {
            auto sieve = SieveTable::build(required_sieve_limit(x, k, q), q,
                                           SieveOptions{std::uint64_t(1) << 20, workers,
                                                        std::uint64_t(2) << 30, ""});
            return sig_map_to_dict(count_all_signatures(sieve, x, k, q, nullptr, workers));
        },
        py::arg("x"), py::arg("k"), py::arg("q"), py::arg("workers") = 1);
    m.def(
        "brute_force_counts",
        [](std::uint64_t x, int k, std::uint64_t q) {
            return sig_map_to_dict(brute_force_counts(x, k, q));
        },
        py::arg("x"), py::arg("k"), py::arg("q"));
    m.def(
        "pomerance_diagnostic",
        [](std::uint64_t q, std::uint64_t a, std::uint64_t x) {
            SieveOptions o;
            o.workers = default_workers();
            auto sieve = SieveTable::build(std::max<std::uint64_t>(x, 1'000'000), 0, o);
            PomeranceDiagnostic d = pomerance_diagnostic(q, a, x, sieve);
            py::dict out;
            out["q"] = d.q;
            out["a"] = d.a;
            out["x"] = d.x;
            out["least_prime"] = d.least_prime_qa;
            out["lhs"] = d.lhs;
            out["rhs"] = d.rhs;
            out["gap"] = d.gap;
            out["error_scale"] = d.scale;
            return out;
        },
        py::arg("q"), py::arg("a"), py::arg("x"));
    m.def(
        "selftest",
        [](std::vector<std::uint64_t> extra_q, int workers) {
            SelftestOptions opts;
            for (auto q : extra_q) opts.moduli.push_back(q);
            opts.workers = workers;
            SelftestReport rep = run_selftest(opts);
            return py::make_tuple(rep.all_pass(), rep.text);
        },
        py::arg("extra_q") = std::vector<std::uint64_t>{}, py::arg("workers") = 1);
}
