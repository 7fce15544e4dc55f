#include "qhol/annihilator.hpp"

namespace qhol {

std::string to_string(VerifyStatus s) {
    switch (s) {
        case VerifyStatus::Claimed: return "claimed";
        case VerifyStatus::WindowVerified: return "window-verified";
        case VerifyStatus::Certified: return "certified";
    }
    return "unknown";
}

std::int64_t AnnihilatorSystem::order(int axis) const {
    return dir(axis).degree_L(axis);
}

const WeylOperator& AnnihilatorSystem::dir(int axis) const {
    auto it = direction.find(axis);
    if (it == direction.end())
        throw UsageError("no direction operator for axis " + std::to_string(axis));
    return it->second;
}

std::vector<WeylOperator> AnnihilatorSystem::all_operators() const {
    std::vector<WeylOperator> out;
    for (auto& [axis, op] : direction) out.push_back(op);
    for (auto& op : extras) out.push_back(op);
    return out;
}

void AnnihilatorSystem::validate() const {
    for (auto& [axis, op] : direction) {
        if (axis < 0 || axis >= rank)
            throw UsageError("direction axis out of range");
        if (op.is_zero())
            throw UsageError("zero direction operator for axis " + std::to_string(axis));
        if (op.rank() != rank)
            throw UsageError("direction operator rank mismatch");
        if (!op.single_L_direction(axis))
            throw UsageError("direction operator for axis " + std::to_string(axis) +
                             " uses a foreign shift generator");
        if (!op.is_plus())
            throw UsageError("direction operator has negative exponents");
    }
    for (auto& op : extras)
        if (op.rank() != rank) throw UsageError("extra operator rank mismatch");
}

WeylOperator l_coefficient(const WeylOperator& op, int axis, std::int64_t j) {
    WeylOperator out = WeylOperator::zero(op.rank(), op.sring());
    const int r = op.rank();
    for (auto& [key, c] : op.terms()) {
        if (key[static_cast<std::size_t>(r + axis)] != j) continue;
        Exps alpha(key.begin(), key.begin() + r);
        Exps beta(key.begin() + r, key.end());
        beta[static_cast<std::size_t>(axis)] = 0;
        out.add_term(alpha, beta, c);
    }
    return out;
}

}  // namespace qhol
