#pragma once

#include <json.hpp>

#include "ifsdim/attractor.hpp"
#include "ifsdim/classifier.hpp"
#include "ifsdim/dimension.hpp"
#include "ifsdim/metrology.hpp"
#include "ifsdim/osc_planar.hpp"

namespace ifsdim {

using Json = nlohmann::ordered_json;

Json to_json(const ClassificationReport& rep, const IfsSystem& system);
Json to_json(const DimensionEquation& eq);
Json to_json(const DimensionResult& r);
Json to_json(const ClosedForm& cf);
Json to_json(const OscCertificate& cert);
Json to_json(const CertificateCheck& check);
Json to_json(const TopologyVerdict& tv);
Json to_json(const ConnectivityReport& cr);
Json to_json(const BoxCountCurve& curve);

}  // namespace ifsdim
