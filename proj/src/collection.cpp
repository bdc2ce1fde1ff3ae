#include "vscreen/data/collection.hpp"

#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "vscreen/chem/smiles.hpp"
#include "vscreen/core/csv.hpp"
#include "vscreen/core/parallel.hpp"

namespace vscreen::data {

using nlohmann::json;

std::string to_string(Group g) {
  switch (g) {
    case Group::PCBA: return "PCBA";
    case Group::MUV: return "MUV";
    case Group::DUDE: return "DUDE";
    case Group::TOX21: return "TOX21";
    case Group::SYNTH: return "SYNTH";
  }
  return "SYNTH";
}

Group group_from_string(const std::string& s) {
  if (s == "PCBA") return Group::PCBA;
  if (s == "MUV") return Group::MUV;
  if (s == "DUDE" || s == "DUD-E") return Group::DUDE;
  if (s == "TOX21" || s == "Tox21") return Group::TOX21;
  if (s == "SYNTH") return Group::SYNTH;
  throw DataError("unknown dataset group: " + s);
}

std::size_t Dataset::n_active() const {
  std::size_t n = 0;
  for (const Record& r : records) n += static_cast<std::size_t>(r.label != 0);
  return n;
}

const Dataset& Collection::dataset(const std::string& id) const {
  int i = dataset_index(id);
  if (i < 0) throw DataError("no such dataset: " + id);
  return datasets[static_cast<std::size_t>(i)];
}

int Collection::dataset_index(const std::string& id) const {
  for (std::size_t i = 0; i < datasets.size(); ++i)
    if (datasets[i].id == id) return static_cast<int>(i);
  return -1;
}

std::vector<std::string> Collection::dataset_ids() const {
  std::vector<std::string> ids;
  ids.reserve(datasets.size());
  for (const Dataset& d : datasets) ids.push_back(d.id);
  return ids;
}

std::string Collection::compound_key(const Record& r) const {
  if (match_mode == MatchMode::CompoundId) return r.compound_id;
  return r.fingerprint.to_hex();
}

void Collection::validate() const {
  std::set<std::string> ids;
  for (const Dataset& d : datasets) {
    if (!ids.insert(d.id).second) throw DataError("duplicate dataset id: " + d.id);
    std::set<std::string> compounds;
    for (const Record& r : d.records) {
      if (!compounds.insert(r.compound_id).second)
        throw DataError(d.id + ": duplicate compound_id " + r.compound_id);
      if (r.weight <= 0.0) throw DataError(d.id + ": non-positive record weight");
      if (r.label != 0 && r.label != 1)
        throw DataError(d.id + ": label must be 0 or 1");
    }
  }
  for (const std::string& id : held_in)
    if (dataset_index(id) < 0) throw DataError("held_in references unknown dataset " + id);
  for (const std::string& id : held_out) {
    if (dataset_index(id) < 0) throw DataError("held_out references unknown dataset " + id);
    for (const std::string& in : held_in)
      if (in == id) throw DataError("dataset in both held_in and held_out: " + id);
  }
}

namespace {

void accumulate(LoadReport& report, const std::string& dataset,
                const std::string& group, bool ok) {
  auto bump = [&](FeaturizationCounts& c) {
    ++c.total;
    if (ok) ++c.parsed;
    else ++c.failed;
  };
  bump(report.per_dataset[dataset]);
  bump(report.per_group[group]);
}

}  // namespace

LoadResult load_collection(const std::string& manifest_path, unsigned threads) {
  std::ifstream in(manifest_path);
  if (!in) throw DataError("cannot open manifest: " + manifest_path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError(manifest_path + ": " + e.what());
  }

  LoadResult result;
  Collection& c = result.collection;
  c.nbits = doc.value("nbits", std::size_t{1024});
  const unsigned radius = doc.value("radius", 2u);
  const std::string match_on = doc.value("match_on", std::string("compound_id"));
  if (match_on == "compound_id") c.match_mode = MatchMode::CompoundId;
  else if (match_on == "fingerprint") c.match_mode = MatchMode::Fingerprint;
  else throw DataError("manifest match_on must be compound_id or fingerprint");

  const auto base = std::filesystem::path(manifest_path).parent_path();

  if (!doc.contains("datasets") || !doc["datasets"].is_array())
    throw DataError(manifest_path + ": manifest needs a datasets array");

  const std::size_t n = doc["datasets"].size();
  c.datasets.resize(n);
  std::vector<LoadReport> reports(n);

  parallel_for(n, threads, [&](std::size_t i) {
    const json& entry = doc["datasets"][i];
    Dataset d;
    d.id = entry.at("id").get<std::string>();
    d.group = group_from_string(entry.at("group").get<std::string>());
    d.target_class = entry.value("target_class", std::string("miscellaneous"));
    d.target = entry.value("target", d.id);
    d.duplicate_target = entry.value("duplicate_target", false);

    const std::string rel = entry.at("path").get<std::string>();
    const std::string path =
        std::filesystem::path(rel).is_absolute() ? rel : (base / rel).string();

    CsvReader csv(path);
    const int col_id = csv.require_column("compound_id");
    const int col_smiles = csv.require_column("smiles");
    const int col_label = csv.require_column("label");

    std::vector<std::string> row;
    while (csv.next(row)) {
      const std::string& compound_id = row[col_id];
      const std::string& smiles = row[col_smiles];
      const std::string& label_str = row[col_label];
      int label;
      if (label_str == "0") label = 0;
      else if (label_str == "1") label = 1;
      else throw DataError(path + ": label must be 0 or 1, got '" + label_str + "'");
      try {
        chem::Molecule mol = chem::parse_smiles(smiles);
        Record r;
        r.compound_id = compound_id;
        r.fingerprint = chem::ecfp(mol, radius, c.nbits);
        r.label = label;
        d.records.push_back(std::move(r));
        accumulate(reports[i], d.id, to_string(d.group), true);
      } catch (const chem::SmilesError& e) {
        accumulate(reports[i], d.id, to_string(d.group), false);
        reports[i].messages.push_back(d.id + "/" + compound_id + ": " + e.what());
      }
    }
    c.datasets[i] = std::move(d);
  });

  for (const LoadReport& part : reports) {
    for (const auto& [key, counts] : part.per_dataset) {
      FeaturizationCounts& dst = result.report.per_dataset[key];
      dst.total += counts.total;
      dst.parsed += counts.parsed;
      dst.failed += counts.failed;
    }
    for (const auto& [key, counts] : part.per_group) {
      FeaturizationCounts& dst = result.report.per_group[key];
      dst.total += counts.total;
      dst.parsed += counts.parsed;
      dst.failed += counts.failed;
    }
    result.report.messages.insert(result.report.messages.end(),
                                  part.messages.begin(), part.messages.end());
  }

  if (doc.contains("held_in"))
    c.held_in = doc["held_in"].get<std::vector<std::string>>();
  if (doc.contains("held_out"))
    c.held_out = doc["held_out"].get<std::vector<std::string>>();

  c.validate();
  return result;
}

void save_collection(const Collection& c, const std::string& path) {
  json datasets = json::array();
  for (const Dataset& d : c.datasets) {
    json records = json::array();
    for (const Record& r : d.records)
      records.push_back({{"id", r.compound_id},
                         {"fp", r.fingerprint.to_hex()},
                         {"label", r.label},
                         {"weight", r.weight}});
    datasets.push_back({{"id", d.id},
                        {"group", to_string(d.group)},
                        {"target_class", d.target_class},
                        {"target", d.target},
                        {"duplicate_target", d.duplicate_target},
                        {"records", std::move(records)}});
  }
  json doc = {{"format", "vscreen-collection"},
              {"version", 1},
              {"nbits", c.nbits},
              {"match_on",
               c.match_mode == MatchMode::CompoundId ? "compound_id" : "fingerprint"},
              {"held_in", c.held_in},
              {"held_out", c.held_out},
              {"datasets", std::move(datasets)}};
  std::ofstream out(path);
  if (!out) throw DataError("cannot write collection: " + path);
  out << doc.dump() << "\n";
}

Collection load_collection_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open collection: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  if (doc.value("format", std::string()) != "vscreen-collection")
    throw DataError(path + ": not a collection file");
  Collection c;
  c.nbits = doc.at("nbits").get<std::size_t>();
  c.match_mode = doc.value("match_on", std::string("compound_id")) == "fingerprint"
                     ? MatchMode::Fingerprint
                     : MatchMode::CompoundId;
  c.held_in = doc.value("held_in", std::vector<std::string>{});
  c.held_out = doc.value("held_out", std::vector<std::string>{});
  for (const json& entry : doc.at("datasets")) {
    Dataset d;
    d.id = entry.at("id").get<std::string>();
    d.group = group_from_string(entry.at("group").get<std::string>());
    d.target_class = entry.value("target_class", std::string("miscellaneous"));
    d.target = entry.value("target", d.id);
    d.duplicate_target = entry.value("duplicate_target", false);
    for (const json& rec : entry.at("records")) {
      Record r;
      r.compound_id = rec.at("id").get<std::string>();
      r.fingerprint =
          chem::Fingerprint::from_hex(rec.at("fp").get<std::string>(), c.nbits);
      r.label = rec.at("label").get<int>();
      r.weight = rec.value("weight", 1.0);
      d.records.push_back(std::move(r));
    }
    c.datasets.push_back(std::move(d));
  }
  c.validate();
  return c;
}

}  // namespace vscreen::data
