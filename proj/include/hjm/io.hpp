#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "hjm/entropy_limit.hpp"
#include "hjm/hamiltonian.hpp"
#include "hjm/hj_layer.hpp"
#include "hjm/verifier.hpp"

namespace hjm {

using Json = nlohmann::ordered_json;

Json to_json(const HamiltonianSpec& h);
Json to_json(const TailReport& r);
Json to_json(const HypothesisReport& r);
Json to_json(const Bracket& b);
Json to_json(const RefineSchedule& s);
Json to_json(const RefinementInfo& r);
Json to_json(const AtomVerdict& v);
Json to_json(const WaitingTimeReport& r);
Json to_json(const ComparisonReport& r);
Json to_json(const CorrespondenceReport& r);
Json to_json(const JumpSeries& j);
Json to_json(const BvReport& r);

void write_json(const std::filesystem::path& path, const Json& j);
// rows: time, then one column per point; at most `max_levels` evenly strided levels
void write_field_csv(const std::filesystem::path& path, const GridField& f, int max_levels = 21);
void write_atoms_csv(const std::filesystem::path& path, const MeasureSolution& s);
void write_traces_csv(const std::filesystem::path& path, const MeasureSolution& s);

}  // namespace hjm
