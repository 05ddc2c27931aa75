#pragma once

#include <memory>
#include <string>

#include "stabnet/graph.hpp"

namespace stabnet::test {

inline std::string data_path(const std::string& relative) { return std::string(STABNET_DATA_DIR) + "/" + relative; }

inline std::shared_ptr<const Graph> graph_file(const std::string& name) {
  return std::make_shared<const Graph>(Graph::load(data_path("graphs/" + name + ".json")));
}

inline std::shared_ptr<const Graph> fibonacci() { return graph_file("fibonacci"); }

inline std::shared_ptr<const Graph> loops(std::size_t m) {
  return std::make_shared<const Graph>(Graph::single_vertex(m));
}

}  // namespace stabnet::test
