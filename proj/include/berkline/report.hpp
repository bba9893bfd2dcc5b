#pragma once

#include <json.hpp>

#include "berkline/dynamics.hpp"
#include "berkline/numeric.hpp"

namespace berkline {

using Json = nlohmann::ordered_json;

// All reports use fixed field order and complex values rendered in the
// literal grammar with 12 significant digits, so identical inputs give
// byte-identical output.
constexpr int kReportDigits = 12;

Json toJson(const TypeIIPoint& xi);
Json toJson(const Direction& dir);
Json toJson(const TangentData& td);
Json toJson(const CycleRecord& rec);
Json toJson(const TypeICycle& cyc, const ToleranceConfig& tol);
Json toJson(const RiveraInstance& inst);
Json toJson(const RiveraCountReport& rep);
Json toJson(const HoleSet& holes);
Json toJson(const ReduceResult& red);
Json toJson(const ComplexCycle& cyc);
Json toJson(const FsiReport& rep);
Json toJson(const RescaleTable& table);

std::string censusCsv(const FsiReport& rep);
std::string rescaleCsv(const RescaleTable& table);

// DOT rendering of the finite join skeleton spanned by the given type II
// points (closed under pairwise joins) with optional type I leaves. Edge
// labels are hyperbolic lengths as "p/q"; when a bicritical map is supplied,
// edges inside its ramification segment get ramified=true, and edges inside
// the hull of the supplied boundary cycle get hull=true.
std::string dotSkeleton(std::vector<TypeIIPoint> points, const std::vector<ProjPointL>& leaves,
                        const RationalMapL* phi, const CycleRecord* hull,
                        const ToleranceConfig& tol);

}  // namespace berkline
