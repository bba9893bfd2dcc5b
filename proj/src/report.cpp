#include "berkline/report.hpp"

#include <sstream>

namespace berkline {

namespace {

std::string pointStr(const ProjPointL& p, const ToleranceConfig& tol) {
  if (p.isInf()) return "inf";
  CSeries z = p.affineValue(tol);
  std::string s = printSeries(z, kReportDigits);
  if (z.prec() >= exactPrec()) {
    size_t pos = s.rfind(" + O(");
    if (pos != std::string::npos) s = s.substr(0, pos);
  }
  return s;
}

std::string dotQuote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\\\"";
    else out += c;
  }
  return out + "\"";
}

}  // namespace

Json toJson(const TypeIIPoint& xi) { return xi.str(kReportDigits); }

Json toJson(const Direction& dir) {
  Json j;
  j["at"] = toJson(dir.at);
  j["residue"] = formatExtComplex(dir.residue, kReportDigits);
  return j;
}

Json toJson(const TangentData& td) {
  Json j;
  j["source"] = toJson(td.source);
  j["image"] = toJson(td.image);
  j["map"] = formatRatFunc(td.map, "u", kReportDigits);
  j["localDegree"] = td.localDegree;
  return j;
}

Json toJson(const CycleRecord& rec) {
  Json j;
  j["points"] = Json::array();
  for (const auto& p : rec.points) j["points"].push_back(toJson(p));
  j["period"] = rec.period;
  j["localDegrees"] = rec.localDegrees;
  j["firstReturn"] = formatRatFunc(rec.firstReturn, "u", kReportDigits);
  j["classification"] = rec.classification == CycleClass::repelling ? "repelling" : "indifferent";
  return j;
}

Json toJson(const TypeICycle& cyc, const ToleranceConfig& tol) {
  Json j;
  j["points"] = Json::array();
  for (const auto& p : cyc.points) j["points"].push_back(pointStr(p, tol));
  j["period"] = cyc.period;
  j["multiplier"] = printSeries(cyc.multiplier, kReportDigits);
  return j;
}

Json toJson(const RiveraInstance& inst) {
  Json j;
  j["boundary"] = toJson(inst.boundary);
  j["center"] = toJson(inst.center);
  j["fixedBoundaryMultiplicities"] = Json::array();
  for (const auto& [pt, m] : inst.fixedBoundaryMultiplicities)
    j["fixedBoundaryMultiplicities"].push_back(Json::array({toJson(pt), m}));
  return j;
}

Json toJson(const RiveraCountReport& rep) {
  Json j;
  j["observed"] = rep.observed;
  j["formula"] = rep.formula;
  j["fixedBoundaryMultiplicities"] = Json::array();
  for (const auto& [pt, m] : rep.fixedBoundaryMultiplicities)
    j["fixedBoundaryMultiplicities"].push_back(Json::array({toJson(pt), m}));
  return j;
}

Json toJson(const HoleSet& holes) {
  Json j = Json::array();
  for (const auto& [p, m] : holes.entries)
    j.push_back(Json::array({formatExtComplex(p, kReportDigits), m}));
  return j;
}

Json toJson(const ReduceResult& red) {
  Json j;
  j["holes"] = toJson(red.holes);
  j["reduced"] = red.reducedIsInfinity ? Json("inf") : Json(formatRatFunc(red.reduced, "z", kReportDigits));
  j["reducedDegree"] = red.reducedIsInfinity ? 0 : red.reduced.degree();
  return j;
}

Json toJson(const ComplexCycle& cyc) {
  Json j;
  j["points"] = Json::array();
  for (const auto& p : cyc.points) j["points"].push_back(formatExtComplex(p, kReportDigits));
  j["period"] = cyc.period;
  j["multiplier"] = formatComplex(cyc.multiplier, kReportDigits);
  j["class"] = cycleKindName(cyc.kind);
  return j;
}

Json toJson(const FsiReport& rep) {
  Json j;
  j["cycles"] = Json::array();
  for (const auto& c : rep.cycles) j["cycles"].push_back(toJson(c));
  j["nonrepellingCount"] = rep.nonrepellingCount;
  j["bound"] = rep.bound;
  j["gammaLower"] = rep.gammaLower;
  j["deltaUpper"] = rep.deltaUpper;
  j["flagged"] = rep.flagged;
  return j;
}

Json toJson(const RescaleTable& table) {
  Json j;
  j["rows"] = Json::array();
  for (const auto& row : table.rows) {
    Json r;
    r["t"] = formatComplex(Scalar(row.t), kReportDigits);
    r["supError"] = formatComplex(Scalar(row.supError), kReportDigits);
    j["rows"].push_back(r);
  }
  j["decreasing"] = table.decreasing;
  return j;
}

std::string censusCsv(const FsiReport& rep) {
  std::ostringstream os;
  os << "period,class,multiplier,points\n";
  for (const auto& c : rep.cycles) {
    os << c.period << "," << cycleKindName(c.kind) << "," << formatComplex(c.multiplier, kReportDigits)
       << ",\"";
    for (size_t i = 0; i < c.points.size(); ++i) {
      if (i) os << ";";
      os << formatExtComplex(c.points[i], kReportDigits);
    }
    os << "\"\n";
  }
  os << "# nonrepellingCount=" << rep.nonrepellingCount << " bound=" << rep.bound
     << " gammaLower=" << rep.gammaLower << " deltaUpper=" << rep.deltaUpper
     << " flagged=" << (rep.flagged ? 1 : 0) << "\n";
  return os.str();
}

std::string rescaleCsv(const RescaleTable& table) {
  std::ostringstream os;
  os << "t,supError\n";
  for (const auto& row : table.rows)
    os << formatComplex(Scalar(row.t), kReportDigits) << ","
       << formatComplex(Scalar(row.supError), kReportDigits) << "\n";
  os << "# decreasing=" << (table.decreasing ? 1 : 0) << "\n";
  return os.str();
}

std::string dotSkeleton(std::vector<TypeIIPoint> points, const std::vector<ProjPointL>& leaves,
                        const RationalMapL* phi, const CycleRecord* hull,
                        const ToleranceConfig& tol) {
  // Close the vertex set under pairwise joins.
  auto known = [&](const TypeIIPoint& p) {
    for (const auto& q : points)
      if (p.eq(q, tol)) return true;
    return false;
  };
  for (size_t grow = 0; grow < points.size(); ++grow) {
    size_t n = points.size();
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j) {
        TypeIIPoint join = joinOf(points[i], points[j], tol);
        if (!known(join)) points.push_back(join);
      }
    if (points.size() == n) break;
  }

  auto onHull = [&](const TypeIIPoint& p) {
    if (!hull) return false;
    for (size_t i = 0; i < hull->points.size(); ++i)
      for (size_t j = i + 1; j < hull->points.size(); ++j)
        if (onSegment(p, hull->points[i], hull->points[j], tol)) return true;
    return false;
  };

  std::ostringstream os;
  os << "graph skeleton {\n  node [shape=ellipse];\n";
  for (const auto& p : points) os << "  " << dotQuote(p.str(kReportDigits)) << ";\n";

  // Each vertex connects upward to the smallest strictly containing vertex.
  for (const auto& p : points) {
    const TypeIIPoint* parent = nullptr;
    for (const auto& q : points) {
      if (q.eq(p, tol)) continue;
      if (!q.containsBall(p, tol)) continue;
      if (!parent || q.rexp() > parent->rexp()) parent = &q;
    }
    if (!parent) continue;
    os << "  " << dotQuote(p.str(kReportDigits)) << " -- " << dotQuote(parent->str(kReportDigits))
       << " [label=\"" << hypDistance(p, *parent, tol).str() << "\"";
    if (phi && onRamification(*phi, p, tol) && onRamification(*phi, *parent, tol))
      os << ", ramified=true";
    if (onHull(p) && onHull(*parent)) os << ", hull=true";
    os << "];\n";
  }

  for (const auto& z : leaves) {
    std::string id = pointStr(z, tol);
    os << "  " << dotQuote(id) << " [shape=point];\n";
    const TypeIIPoint* host = nullptr;
    for (const auto& q : points) {
      bool inside = !z.isInf() && q.containsPoint(z, tol);
      if (inside && (!host || q.rexp() > host->rexp())) host = &q;
    }
    if (host)
      os << "  " << dotQuote(id) << " -- " << dotQuote(host->str(kReportDigits))
         << " [label=\"inf\", style=dashed];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace berkline
