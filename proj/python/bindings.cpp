#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdio>
#include <cstring>

#include "planeguard/bitplane.hpp"
#include "planeguard/classifier.hpp"
#include "planeguard/dataset.hpp"
#include "planeguard/error.hpp"
#include "planeguard/experiment.hpp"
#include "planeguard/features.hpp"
#include "planeguard/keystream.hpp"
#include "planeguard/lsmr.hpp"

namespace py = pybind11;
using namespace planeguard;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style>;

GrayImage to_image(const U8Array& a) {
    if (a.ndim() != 2) throw InvalidInput("expected a 2-D uint8 array (height, width)");
    const auto h = static_cast<std::size_t>(a.shape(0));
    const auto w = static_cast<std::size_t>(a.shape(1));
    return GrayImage(w, h, std::vector<std::uint8_t>(a.data(), a.data() + w * h));
}

U8Array to_array(const GrayImage& img) {
    U8Array out({static_cast<py::ssize_t>(img.height()), static_cast<py::ssize_t>(img.width())});
    std::memcpy(out.mutable_data(), img.pixels().data(), img.size());
    return out;
}

// Keys and nonces arrive either as raw bytes or as hex text.
template <std::size_t N>
std::array<std::uint8_t, N> to_bytes(const py::object& obj, const char* what) {
    if (py::isinstance<py::str>(obj)) {
        const auto text = obj.cast<std::string>();
        if constexpr (N == 32) return parse_key_hex(text);
        else return parse_nonce_hex(text);
    }
    const auto raw = obj.cast<std::string>();  // bytes
    if (raw.size() != N) {
        throw InvalidArgument(std::string(what) + " must be " + std::to_string(N) + " bytes, got " +
                              std::to_string(raw.size()));
    }
    std::array<std::uint8_t, N> out{};
    std::memcpy(out.data(), raw.data(), N);
    return out;
}

KeystreamSpec to_spec(const py::object& key, const py::object& nonce) {
    return {to_bytes<32>(key, "key"), to_bytes<12>(nonce, "nonce")};
}

std::vector<Label> to_labels(const py::sequence& seq) {
    std::vector<Label> out;
    out.reserve(seq.size());
    for (const auto& item : seq) {
        if (py::isinstance<py::str>(item)) {
            out.push_back(parse_label(item.cast<std::string>()));
        } else {
            const auto v = item.cast<double>();
            if (v == 1.0) out.push_back(Label::Tampered);
            else if (v == -1.0 || v == 0.0) out.push_back(Label::Authentic);
            else throw InvalidInput("numeric labels must be 1 (tampered) or 0 / -1 (authentic)");
        }
    }
    return out;
}

LabeledFeatureSet to_set(const Eigen::MatrixXd& features, const py::sequence& labels) {
    return {features, to_labels(labels)};
}

py::bytes as_bytes(std::span<const std::uint8_t> b) {
    return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

}  // namespace

PYBIND11_MODULE(_planeguard, m) {
    m.doc() = "Selective bitplane encryption, rich-model features and ridge classification";

    auto error = py::register_exception<Error>(m, "Error", PyExc_ValueError);
    py::register_exception<InvalidInput>(m, "InvalidInput", error.ptr());
    py::register_exception<InvalidArgument>(m, "InvalidArgument", error.ptr());
    py::register_exception<DegenerateInput>(m, "DegenerateInput", error.ptr());
    py::register_exception<InvalidTrainingSet>(m, "InvalidTrainingSet", error.ptr());
    py::register_exception<InvalidSplit>(m, "InvalidSplit", error.ptr());

    m.attr("FEATURE_DIM") = kFeatureDim;

    m.def(
        "to_luminance",
        [](const U8Array& rgb) {
            if (rgb.ndim() != 3 || rgb.shape(2) != 3) throw InvalidInput("expected an array of shape (height, width, 3)");
            ColorImage c{static_cast<std::size_t>(rgb.shape(1)), static_cast<std::size_t>(rgb.shape(0)), 3,
                         std::vector<std::uint8_t>(rgb.data(), rgb.data() + rgb.size())};
            return to_array(to_luminance(c));
        },
        py::arg("rgb"));
    m.def(
        "encrypt_planes",
        [](const U8Array& img, int s, const py::object& key, const py::object& nonce) {
            return to_array(encrypt_planes(to_image(img), EncryptionParams{to_spec(key, nonce), s}));
        },
        py::arg("image"), py::arg("s"), py::arg("key"), py::arg("nonce"),
        "XOR the s most significant bitplanes with the ChaCha20 keystream. Key: 32 bytes or 64 hex "
        "characters; nonce: 12 bytes or 24 hex characters.");
    m.def("zero_planes", [](const U8Array& img, int s) { return to_array(zero_planes(to_image(img), s)); },
          py::arg("image"), py::arg("s"));
    m.def("shift_planes", [](const U8Array& img, int s) { return to_array(shift_planes(to_image(img), s)); },
          py::arg("image"), py::arg("s"));

    m.def(
        "keystream_bytes",
        [](const py::object& key, const py::object& nonce, std::size_t count) {
            return as_bytes(keystream_bytes(to_spec(key, nonce), count));
        },
        py::arg("key"), py::arg("nonce"), py::arg("count"));
    m.def(
        "keystream_bits",
        [](const py::object& key, const py::object& nonce, std::size_t count) {
            const auto bits = keystream_bits(to_spec(key, nonce), count);
            U8Array out(static_cast<py::ssize_t>(bits.size()));
            std::memcpy(out.mutable_data(), bits.data(), bits.size());
            return out;
        },
        py::arg("key"), py::arg("nonce"), py::arg("count"));
    m.def("nonce_from_index", [](std::uint64_t i) { return as_bytes(nonce_from_index(i)); }, py::arg("index"));

    m.def(
        "extract_features",
        [](const U8Array& img, int s) {
            auto fv = extract_features(to_image(img), s);
            return py::array_t<double>(static_cast<py::ssize_t>(fv.values.size()), fv.values.data());
        },
        py::arg("image"), py::arg("s") = 0);
    m.def("roster", [] {
        py::list out;
        for (const auto& s : roster()) {
            py::dict d;
            d["id"] = s.id;
            d["type"] = s.type == SubmodelType::Spam ? "spam" : "minmax";
            d["q"] = s.q;
            d["offset"] = s.offset;
            d["dim"] = s.dim;
            out.append(d);
        }
        return out;
    });
    m.def("roster_hash", [] {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(roster_hash()));
        return std::string(buf);
    });

    m.def(
        "lsmr_solve",
        [](const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double damp, double atol, double btol, double conlim,
           std::size_t max_iter) {
            const auto r = lsmr_solve(a, b, {damp, atol, btol, conlim, max_iter});
            py::dict info;
            info["stop"] = std::string(describe(r.stop));
            info["converged"] = r.converged();
            info["iterations"] = r.iterations;
            info["norm_r"] = r.norm_r;
            info["norm_ar"] = r.norm_ar;
            info["norm_a"] = r.norm_a;
            info["cond_a"] = r.cond_a;
            info["norm_x"] = r.norm_x;
            return py::make_tuple(r.x, info);
        },
        py::arg("A"), py::arg("b"), py::arg("damp") = 0.0, py::arg("atol") = 1e-8, py::arg("btol") = 1e-8,
        py::arg("conlim") = 1e8, py::arg("max_iter") = 0);

    py::class_<RidgeModel>(m, "RidgeModel")
        .def_readonly("weights", &RidgeModel::weights)
        .def_readonly("feature_means", &RidgeModel::feature_means)
        .def_readonly("feature_stds", &RidgeModel::feature_stds)
        .def_readonly("label_offset", &RidgeModel::label_offset)
        .def_readonly("lambda_", &RidgeModel::lambda)
        .def_property_readonly("dim", &RidgeModel::dim);

    m.def(
        "train",
        [](const Eigen::MatrixXd& features, const py::sequence& labels, double lambda) {
            return train(to_set(features, labels), lambda);
        },
        py::arg("features"), py::arg("labels"), py::arg("lambda_") = 1.0,
        "Labels: 'authentic' / 'tampered' strings, or 1 for tampered and 0 / -1 for authentic.");
    m.def(
        "predict",
        [](const RidgeModel& model, const Eigen::VectorXd& x) {
            const auto p = predict(model, Eigen::Ref<const Eigen::VectorXd>(x));
            return py::make_tuple(p.score, std::string(name(p.label)));
        },
        py::arg("model"), py::arg("features"));
    m.def(
        "evaluate",
        [](const RidgeModel& model, const Eigen::MatrixXd& features, const py::sequence& labels) {
            return evaluate(model, to_set(features, labels));
        },
        py::arg("model"), py::arg("features"), py::arg("labels"));

    m.def("privacy_index", &privacy_index, py::arg("recognizability_accuracy"));

    m.def(
        "synthesize_dataset",
        [](std::uint64_t seed, std::size_t n_per_class, std::size_t size) {
            const auto data = synthesize_dataset(seed, n_per_class, size);
            py::list images, labels;
            for (std::size_t i = 0; i < data.images.size(); ++i) {
                images.append(to_array(data.images[i]));
                labels.append(std::string(name(data.manifest.entries[i].label)));
            }
            return py::make_tuple(images, labels);
        },
        py::arg("seed"), py::arg("n_per_class"), py::arg("size"));
}
