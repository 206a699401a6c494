#pragma once

// JSON encodings of schemes, regions and weights. Parsers reject unknown keys.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ndqmc/discrepancy.hpp"
#include "ndqmc/error.hpp"
#include "ndqmc/geometry.hpp"
#include "ndqmc/samplers.hpp"
#include "ndqmc/strata.hpp"

namespace ndqmc {

using Json = nlohmann::ordered_json;

namespace detail {

inline void check_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                       const std::string& context) {
  if (!j.is_object()) throw ValidationError(context + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ValidationError(context + ": unknown field \"" + key + "\"");
    }
  }
}

template <class T>
T get_field(const Json& j, const char* key, const std::string& context) {
  if (!j.contains(key)) throw ValidationError(context + ": missing field \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(context + ": field \"" + key + "\" has the wrong type");
  }
}

template <class T>
T get_field_or(const Json& j, const char* key, T fallback, const std::string& context) {
  return j.contains(key) ? get_field<T>(j, key, context) : fallback;
}

}  // namespace detail

// ---------------------------------------------------------------- schemes

inline Json strata_to_json(const StrataSpec& strata) {
  if (const auto* s = std::get_if<Stripes>(&strata)) return Json{{"type", "stripes"}, {"count", s->count}};
  const auto& l = std::get<LatticeCells>(strata);
  return Json{{"type", "lattice"}, {"g", l.g}, {"n", l.n}};
}

inline StrataSpec strata_from_json(const Json& j, std::size_t beta) {
  const std::string ctx = "strata";
  const auto type = detail::get_field<std::string>(j, "type", ctx);
  if (type == "stripes") {
    detail::check_keys(j, {"type", "count"}, ctx);
    return Stripes{detail::get_field_or<std::size_t>(j, "count", beta, ctx)};
  }
  if (type == "lattice") {
    detail::check_keys(j, {"type", "g", "n"}, ctx);
    return LatticeCells{detail::get_field<std::vector<std::int64_t>>(j, "g", ctx),
                        detail::get_field_or<std::size_t>(j, "n", beta, ctx)};
  }
  throw ValidationError("strata: unknown type \"" + type + "\"");
}

inline Json scheme_to_json(const SchemeSpec& spec) {
  struct Visitor {
    Json operator()(const MonteCarlo&) const { return {{"type", "mc"}}; }
    Json operator()(const SimpleStratified&) const { return {{"type", "ss"}}; }
    Json operator()(const GeneralizedStratified& g) const {
      return {{"type", "gss"}, {"beta", g.beta}, {"strata", strata_to_json(g.strata)}};
    }
    Json operator()(const RsjRank1Lattice&) const { return {{"type", "rsj"}}; }
    Json operator()(const LatinHypercube&) const { return {{"type", "lhs"}}; }
    Json operator()(const ScrambledNet& n) const {
      return {{"type", "net"}, {"base", n.base}, {"m", n.m}, {"s", n.s}};
    }
    Json operator()(const Mixed& m) const {
      return {{"type", "mixed"},
              {"left", scheme_to_json(*m.left)},
              {"d_left", m.d_left},
              {"right", scheme_to_json(*m.right)},
              {"d_right", m.d_right}};
    }
    Json operator()(const MinCopula&) const { return {{"type", "mincopula"}}; }
    Json operator()(const FourSlot&) const { return {{"type", "fourslot"}}; }
    Json operator()(const SwapScheme&) const { return {{"type", "swap"}}; }
  };
  return std::visit(Visitor{}, spec.kind);
}

inline SchemeSpec scheme_from_json(const Json& j);

/// Shorthand strings: "mc", "lhs", ... and "lhs:2+mc:3" for a mixed scheme.
inline SchemeSpec scheme_from_string(const std::string& text) {
  const auto plus = text.find('+');
  if (plus != std::string::npos) {
    auto part = [&](const std::string& s) {
      const auto colon = s.find(':');
      if (colon == std::string::npos) {
        throw ValidationError("scheme \"" + text + "\": mixed parts need the form name:dim");
      }
      std::size_t dim = 0;
      try {
        dim = static_cast<std::size_t>(std::stoul(s.substr(colon + 1)));
      } catch (const std::exception&) {
        throw ValidationError("scheme \"" + text + "\": bad dimension in \"" + s + "\"");
      }
      return std::pair{scheme_from_string(s.substr(0, colon)), dim};
    };
    auto [left, dl] = part(text.substr(0, plus));
    auto [right, dr] = part(text.substr(plus + 1));
    return make_mixed(std::move(left), dl, std::move(right), dr);
  }
  return scheme_from_json(Json{{"type", text}});
}

inline SchemeSpec scheme_from_json(const Json& j) {
  if (j.is_string()) return scheme_from_string(j.get<std::string>());
  const std::string ctx = "scheme";
  const auto type = detail::get_field<std::string>(j, "type", ctx);
  auto plain = [&](auto kind) -> SchemeSpec {
    detail::check_keys(j, {"type"}, ctx + " " + type);
    return kind;
  };
  if (type == "mc") return plain(MonteCarlo{});
  if (type == "ss") return plain(SimpleStratified{});
  if (type == "rsj") return plain(RsjRank1Lattice{});
  if (type == "lhs") return plain(LatinHypercube{});
  if (type == "mincopula") return plain(MinCopula{});
  if (type == "fourslot") return plain(FourSlot{});
  if (type == "swap") return plain(SwapScheme{});
  if (type == "gss") {
    detail::check_keys(j, {"type", "beta", "strata"}, ctx + " gss");
    const auto beta = detail::get_field<std::size_t>(j, "beta", ctx + " gss");
    const StrataSpec strata =
        j.contains("strata") ? strata_from_json(j.at("strata"), beta) : StrataSpec{Stripes{beta}};
    return GeneralizedStratified{beta, strata};
  }
  if (type == "net") {
    detail::check_keys(j, {"type", "base", "m", "s"}, ctx + " net");
    return ScrambledNet{detail::get_field<unsigned>(j, "base", ctx), detail::get_field<unsigned>(j, "m", ctx),
                        detail::get_field<unsigned>(j, "s", ctx)};
  }
  if (type == "mixed") {
    detail::check_keys(j, {"type", "left", "d_left", "right", "d_right"}, ctx + " mixed");
    if (!j.contains("left") || !j.contains("right")) {
      throw ValidationError("scheme mixed: fields \"left\" and \"right\" are required");
    }
    return make_mixed(scheme_from_json(j.at("left")), detail::get_field<std::size_t>(j, "d_left", ctx),
                      scheme_from_json(j.at("right")), detail::get_field<std::size_t>(j, "d_right", ctx));
  }
  throw ValidationError("scheme: unknown type \"" + type + "\"");
}

// ---------------------------------------------------------------- regions

inline Json region_to_json(const Region& region) {
  struct Visitor {
    Json operator()(const CornerBox0& b) const { return {{"type", "corner0"}, {"upper", b.upper}}; }
    Json operator()(const CornerBox1& b) const { return {{"type", "corner1"}, {"lower", b.lower}}; }
    Json operator()(const Interval& b) const { return {{"type", "interval"}, {"a", b.a}, {"b", b.b}}; }
    Json operator()(const BoxDiff& b) const {
      return {{"type", "boxdiff"}, {"outer", b.outer.upper}, {"inner", b.inner.upper}};
    }
    Json operator()(const ElementaryInterval& b) const {
      return {{"type", "elementary"}, {"base", b.base}, {"j", b.j}, {"k", b.k}};
    }
  };
  return std::visit(Visitor{}, region);
}

inline Region region_from_json(const Json& j) {
  const std::string ctx = "region";
  const auto type = detail::get_field<std::string>(j, "type", ctx);
  if (type == "corner0") {
    detail::check_keys(j, {"type", "upper"}, ctx);
    return CornerBox0(detail::get_field<Coords>(j, "upper", ctx));
  }
  if (type == "corner1") {
    detail::check_keys(j, {"type", "lower"}, ctx);
    return CornerBox1(detail::get_field<Coords>(j, "lower", ctx));
  }
  if (type == "interval") {
    detail::check_keys(j, {"type", "a", "b"}, ctx);
    return Interval(detail::get_field<Coords>(j, "a", ctx), detail::get_field<Coords>(j, "b", ctx));
  }
  if (type == "boxdiff") {
    detail::check_keys(j, {"type", "outer", "inner"}, ctx);
    return BoxDiff(CornerBox0(detail::get_field<Coords>(j, "outer", ctx)),
                   CornerBox0(detail::get_field<Coords>(j, "inner", ctx)));
  }
  if (type == "elementary") {
    detail::check_keys(j, {"type", "base", "j", "k"}, ctx);
    return ElementaryInterval(detail::get_field<unsigned>(j, "base", ctx),
                              detail::get_field<std::vector<unsigned>>(j, "j", ctx),
                              detail::get_field<std::vector<std::uint64_t>>(j, "k", ctx));
  }
  throw ValidationError("region: unknown type \"" + type + "\"");
}

// ---------------------------------------------------------------- weights

/// Explicit weights are keyed by comma-separated 0-based coordinate lists,
/// e.g. {"0": 1, "0,1": 0.5}.
inline Weights weights_from_json(const Json& j) {
  const std::string ctx = "weights";
  detail::check_keys(j, {"type", "gamma"}, ctx);
  const auto type = detail::get_field<std::string>(j, "type", ctx);
  if (type == "product") return ProductWeights{detail::get_field<std::vector<double>>(j, "gamma", ctx)};
  if (type != "explicit") throw ValidationError("weights: unknown type \"" + type + "\"");
  if (!j.contains("gamma") || !j.at("gamma").is_object()) {
    throw ValidationError("weights: explicit weights need a \"gamma\" object");
  }
  ExplicitWeights out;
  for (const auto& [key, value] : j.at("gamma").items()) {
    std::uint64_t mask = 0;
    std::size_t pos = 0;
    while (pos <= key.size()) {
      const auto comma = std::min(key.find(',', pos), key.size());
      try {
        const auto coord = std::stoul(key.substr(pos, comma - pos));
        detail::require(coord < 64, "weights: coordinate index too large");
        mask |= std::uint64_t{1} << coord;
      } catch (const std::logic_error&) {
        throw ValidationError("weights: bad subset key \"" + key + "\"");
      }
      pos = comma + 1;
    }
    if (!value.is_number()) throw ValidationError("weights: weight for \"" + key + "\" must be a number");
    out.gamma[mask] = value.get<double>();
  }
  return out;
}

}  // namespace ndqmc
