#include "vscreen/net/config.hpp"

#include "json.hpp"

namespace vscreen::net {

using nlohmann::json;

std::string NetworkConfig::to_json() const {
  json schedule = json::array();
  for (const auto& [step, rate] : lr_schedule)
    schedule.push_back({{"step", step}, {"rate", rate}});
  json doc = {{"input_dim", input_dim},
              {"hidden_sizes", hidden_sizes},
              {"n_tasks", n_tasks},
              {"dropout_rate", dropout_rate},
              {"dropout_all_layers", dropout_all_layers},
              {"learning_rate", learning_rate},
              {"batch_size", batch_size},
              {"n_steps", n_steps},
              {"init_std", init_std},
              {"init_bias", init_bias},
              {"seed", seed},
              {"lr_schedule", schedule},
              {"n_workers", n_workers},
              {"log_every", log_every}};
  return doc.dump();
}

NetworkConfig NetworkConfig::from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("bad network config: ") + e.what());
  }
  NetworkConfig cfg;
  cfg.input_dim = doc.value("input_dim", cfg.input_dim);
  if (doc.contains("hidden_sizes"))
    cfg.hidden_sizes = doc["hidden_sizes"].get<std::vector<std::size_t>>();
  cfg.n_tasks = doc.value("n_tasks", cfg.n_tasks);
  cfg.dropout_rate = doc.value("dropout_rate", cfg.dropout_rate);
  cfg.dropout_all_layers = doc.value("dropout_all_layers", cfg.dropout_all_layers);
  cfg.learning_rate = doc.value("learning_rate", cfg.learning_rate);
  cfg.batch_size = doc.value("batch_size", cfg.batch_size);
  cfg.n_steps = doc.value("n_steps", cfg.n_steps);
  cfg.init_std = doc.value("init_std", cfg.init_std);
  cfg.init_bias = doc.value("init_bias", cfg.init_bias);
  cfg.seed = doc.value("seed", cfg.seed);
  if (doc.contains("lr_schedule")) {
    cfg.lr_schedule.clear();
    for (const json& item : doc["lr_schedule"])
      cfg.lr_schedule.emplace_back(item.at("step").get<std::size_t>(),
                                   item.at("rate").get<double>());
  }
  cfg.n_workers = doc.value("n_workers", cfg.n_workers);
  cfg.log_every = doc.value("log_every", cfg.log_every);
  cfg.validate();
  return cfg;
}

}  // namespace vscreen::net
