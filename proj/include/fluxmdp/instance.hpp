#pragma once

#include "fluxmdp/numerics.hpp"
#include "fluxmdp/rational.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fluxmdp {

using json = nlohmann::json;

class InstanceError : public std::runtime_error {
  public:
    enum class Kind { EmptyStateActions, BadDiscount, BadIndex, DuplicateActionId, BadFormat };

    InstanceError(Kind kind, long index, const std::string& message)
        : std::runtime_error(message), kind_(kind), index_(index) {}

    Kind kind() const { return kind_; }
    long index() const { return index_; } // offending state or action id, -1 if n/a

  private:
    Kind kind_;
    long index_;
};

/// One deterministic action: an edge source -> target with a reward and its
/// own discount factor in [0, 1).
struct ActionDef {
    int id = 0;
    int source = 0;
    int target = 0;
    Rational reward;
    Rational discount;
};

namespace detail {

inline std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

/**
 * SAX handler that builds a DOM but stores every JSON float literal as a
 * string holding its raw token text, so "0.999999999" in an input file can be
 * turned into the exact rational 999999999/1000000000 instead of the nearest
 * binary double.
 */
class RawNumberBuilder {
  public:
    json take() { return std::move(root_); }

    bool null() { return emplace(nullptr); }
    bool boolean(bool v) { return emplace(v); }
    bool number_integer(json::number_integer_t v) { return emplace(v); }
    bool number_unsigned(json::number_unsigned_t v) { return emplace(v); }
    bool number_float(json::number_float_t, const std::string& raw) { return emplace(raw); }
    bool string(std::string& v) { return emplace(v); }
    bool binary(json::binary_t& v) { return emplace(v); }

    bool start_object(std::size_t) {
        open_.push_back(place(json::object()));
        return true;
    }
    bool key(std::string& k) {
        key_ = k;
        return true;
    }
    bool end_object() {
        open_.pop_back();
        return true;
    }
    bool start_array(std::size_t) {
        open_.push_back(place(json::array()));
        return true;
    }
    bool end_array() {
        open_.pop_back();
        return true;
    }

    bool parse_error(std::size_t pos, const std::string&, const nlohmann::detail::exception& ex) {
        throw InstanceError(InstanceError::Kind::BadFormat, static_cast<long>(pos), ex.what());
    }

  private:
    template <typename T>
    bool emplace(T&& v) {
        place(json(std::forward<T>(v)));
        return true;
    }

    json* place(json v) {
        if (open_.empty()) {
            root_ = std::move(v);
            return &root_;
        }
        json& top = *open_.back();
        if (top.is_object()) {
            top[key_] = std::move(v);
            return &top[key_];
        }
        top.push_back(std::move(v));
        return &top.back();
    }

    json root_;
    std::vector<json*> open_;
    std::string key_;
};

// Accepts a scalar field that is either a string literal, an integer, or (for
// DOM inputs built in code) a binary double rendered through its shortest
// round-trip decimal text.
inline Rational scalar_field(const json& j, const char* what) {
    if (j.is_string()) {
        try {
            return parse_scalar(j.get<std::string>());
        } catch (const std::invalid_argument& ex) {
            throw InstanceError(InstanceError::Kind::BadFormat, -1,
                                std::string(what) + ": " + ex.what());
        }
    }
    if (j.is_number_integer()) return Rational(BigInt(j.get<std::int64_t>()));
    if (j.is_number_unsigned()) return Rational(BigInt(j.get<std::uint64_t>()));
    if (j.is_number_float()) return parse_scalar(json(j.get<double>()).dump());
    throw InstanceError(InstanceError::Kind::BadFormat, -1,
                        std::string(what) + " must be a number or decimal string");
}

} // namespace detail

/**
 * A validated deterministic MDP: n states, m actions partitioned by source
 * state, every state owning at least one action. Immutable after
 * construction; rewards and discounts are exact rationals regardless of the
 * numeric mode computations later run in.
 */
class Mdp {
  public:
    Mdp(int num_states, std::vector<ActionDef> actions, json meta = nullptr)
        : n_(num_states), actions_(std::move(actions)), meta_(std::move(meta)) {
        if (n_ < 1)
            throw InstanceError(InstanceError::Kind::BadFormat, n_, "need at least one state");
        const int m = static_cast<int>(actions_.size());
        std::vector<char> seen(m, 0);
        per_state_.assign(n_, {});
        for (const ActionDef& a : actions_) {
            if (a.id < 0 || a.id >= m)
                throw InstanceError(InstanceError::Kind::BadIndex, a.id,
                                    "action ids must be dense 0-based integers");
            if (seen[a.id]++)
                throw InstanceError(InstanceError::Kind::DuplicateActionId, a.id,
                                    "duplicate action id " + std::to_string(a.id));
        }
        // store by id so action(id) is an array lookup
        std::vector<ActionDef> by_id(m);
        for (ActionDef& a : actions_) by_id[a.id] = std::move(a);
        actions_ = std::move(by_id);
        for (const ActionDef& a : actions_) {
            if (a.source < 0 || a.source >= n_ || a.target < 0 || a.target >= n_)
                throw InstanceError(InstanceError::Kind::BadIndex, a.id,
                                    "action " + std::to_string(a.id) +
                                        " references a state out of range");
            if (a.discount < 0 || a.discount >= 1)
                throw InstanceError(InstanceError::Kind::BadDiscount, a.id,
                                    "action " + std::to_string(a.id) +
                                        " needs discount in [0,1), got " +
                                        format_scalar(a.discount));
            per_state_[a.source].push_back(a.id);
        }
        for (int s = 0; s < n_; ++s)
            if (per_state_[s].empty())
                throw InstanceError(InstanceError::Kind::EmptyStateActions, s,
                                    "state " + std::to_string(s) + " has no action");
        uniform_ = true;
        for (const ActionDef& a : actions_)
            if (a.discount != actions_[0].discount) {
                uniform_ = false;
                break;
            }
        max_abs_reward_ = 0;
        for (const ActionDef& a : actions_)
            if (abs(a.reward) > max_abs_reward_) max_abs_reward_ = abs(a.reward);
        digest_ = compute_digest();
    }

    int num_states() const { return n_; }
    int num_actions() const { return static_cast<int>(actions_.size()); }
    const ActionDef& action(int id) const { return actions_[static_cast<std::size_t>(id)]; }
    const std::vector<ActionDef>& actions() const { return actions_; }
    /// Action ids usable in `state`, ascending.
    const std::vector<int>& actions_in(int state) const {
        return per_state_[static_cast<std::size_t>(state)];
    }
    bool uniform_discount() const { return uniform_; }
    const Rational& uniform_discount_value() const {
        if (!uniform_)
            throw std::logic_error("instance does not have a uniform discount");
        return actions_[0].discount;
    }
    const Rational& max_abs_reward() const { return max_abs_reward_; }
    const json& meta() const { return meta_; }
    /// 64-bit content hash of states and actions (meta excluded), as hex.
    const std::string& digest() const { return digest_; }

    json to_json() const {
        json acts = json::array();
        for (const ActionDef& a : actions_)
            acts.push_back({{"id", a.id},
                            {"source", a.source},
                            {"target", a.target},
                            {"reward", format_scalar(a.reward)},
                            {"discount", format_scalar(a.discount)}});
        json out{{"n", n_}, {"actions", std::move(acts)}};
        if (!meta_.is_null()) out["meta"] = meta_;
        return out;
    }

    static Mdp from_json(const json& j) {
        if (!j.is_object() || !j.contains("n") || !j.contains("actions") ||
            !j["actions"].is_array())
            throw InstanceError(InstanceError::Kind::BadFormat, -1,
                                "instance must be an object with \"n\" and \"actions\"");
        std::vector<ActionDef> actions;
        for (const json& ja : j["actions"]) {
            ActionDef a;
            a.id = ja.at("id").get<int>();
            a.source = ja.at("source").get<int>();
            a.target = ja.at("target").get<int>();
            a.reward = detail::scalar_field(ja.at("reward"), "reward");
            a.discount = detail::scalar_field(ja.at("discount"), "discount");
            actions.push_back(std::move(a));
        }
        return Mdp(j.at("n").get<int>(), std::move(actions),
                   j.contains("meta") ? j["meta"] : json(nullptr));
    }

    static Mdp parse(const std::string& text) {
        detail::RawNumberBuilder builder;
        json::sax_parse(text, &builder);
        return from_json(builder.take());
    }

    static Mdp load(const std::string& path) {
        std::ifstream in(path);
        if (!in)
            throw InstanceError(InstanceError::Kind::BadFormat, -1, "cannot read " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse(buf.str());
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << to_json().dump(2) << '\n';
    }

  private:
    std::string compute_digest() const {
        std::string canon = "fluxmdp-instance-v1|n=" + std::to_string(n_);
        for (const ActionDef& a : actions_) {
            canon += '|';
            canon += std::to_string(a.id) + ":" + std::to_string(a.source) + ">" +
                     std::to_string(a.target) + ":" + format_scalar(a.reward) + ":" +
                     format_scalar(a.discount);
        }
        return detail::hex64(detail::fnv1a(canon));
    }

    int n_;
    std::vector<ActionDef> actions_;
    std::vector<std::vector<int>> per_state_;
    bool uniform_ = true;
    Rational max_abs_reward_;
    json meta_;
    std::string digest_;
};

/// Default float-mode tolerance: 1e-9 scaled by the largest absolute reward.
inline Numerics<double> make_float_numerics(const Mdp& inst) {
    double scale = to_double(inst.max_abs_reward());
    return Numerics<double>(1e-9 * std::max(1.0, scale));
}

} // namespace fluxmdp
