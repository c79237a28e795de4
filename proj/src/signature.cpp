#include "apbias/signature.hpp"
#include "apbias/errors.hpp"
#include "apbias/primality.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace apbias {

std::string ResidueSignature::str() const {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += "*";
        out += std::to_string(parts[i].first) + "^" + std::to_string(parts[i].second);
    }
    return out;
}

ResidueSignature parse_signature(const std::string& text, std::uint64_t q, std::string* warn) {
    if (q < 3) throw ConfigError("parse_signature: q must be >= 3");
    if (text.empty()) throw ConfigError("parse_signature: empty signature");
    std::map<std::uint64_t, std::uint64_t> acc;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t next = text.find('*', pos);
        std::string piece = text.substr(pos, next == std::string::npos ? next : next - pos);
        pos = next == std::string::npos ? text.size() : next + 1;
        if (piece.empty()) throw ConfigError("parse_signature: empty component in '" + text + "'");
        std::uint64_t b = 0, k = 1;
        std::size_t caret = piece.find('^');
        try {
            b = std::stoull(piece.substr(0, caret));
            if (caret != std::string::npos) k = std::stoull(piece.substr(caret + 1));
        } catch (const std::exception&) {
            throw ConfigError("parse_signature: bad component '" + piece + "'");
        }
        if (k < 1 || k > 64)
            throw ConfigError("parse_signature: multiplicity must be in [1, 64]");
        std::uint64_t reduced = b % q;
        if (reduced != b && warn)
            *warn += "residue " + std::to_string(b) + " reduced to " + std::to_string(reduced) +
                     " mod " + std::to_string(q) + "; ";
        if (gcd_u64(reduced, q) != 1)
            throw ConfigError("parse_signature: residue " + std::to_string(b) +
                              " is not coprime to q=" + std::to_string(q));
        acc[reduced] += k;
    }
    ResidueSignature sig;
    sig.q = q;
    std::uint64_t total = 0;
    for (auto& [b, k] : acc) {
        if (k > 64) throw ConfigError("parse_signature: multiplicity must be in [1, 64]");
        sig.parts.emplace_back(b, std::uint32_t(k));
        total += k;
    }
    if (total > 64) throw ConfigError("parse_signature: total k must be <= 64");
    return sig;
}

ResidueSignature same_class_signature(std::uint64_t q, std::uint64_t b, std::uint32_t k) {
    if (q < 3) throw ConfigError("same_class_signature: q must be >= 3");
    b %= q;
    if (gcd_u64(b, q) != 1)
        throw ConfigError("same_class_signature: residue not coprime to q");
    if (k < 1 || k > 64) throw ConfigError("same_class_signature: k must be in [1, 64]");
    ResidueSignature sig;
    sig.q = q;
    sig.parts.emplace_back(b, k);
    return sig;
}

double ordering_multinomial(const ResidueSignature& sig) {
    // lgamma is avoided on purpose: glibc's writes the global signgam
    auto factorial = [](std::uint32_t n) {
        double f = 1.0;
        for (std::uint32_t i = 2; i <= n; ++i) f *= double(i);
        return f;
    };
    double m = factorial(sig.k_total());
    for (auto& [b, kb] : sig.parts) m /= factorial(kb);
    return std::round(m);
}

} // namespace apbias
