#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace sis::detail {

// Iterative Tarjan. adj[v] lists successors of v. Returns component index per
// vertex; components are numbered in reverse topological order (a component
// only reaches components with smaller or equal index).
struct SccResult {
  std::vector<int> comp;                   // vertex -> component id
  std::vector<std::vector<int>> members;   // component id -> vertices
};

inline SccResult strongly_connected_components(const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  SccResult res;
  res.comp.assign(n, -1);
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<char> on_stack(n, 0);
  int next_index = 0;

  struct Frame {
    int v;
    std::size_t child;
  };
  std::vector<Frame> call;

  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    call.push_back({root, 0});
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      const int v = f.v;
      if (f.child < adj[v].size()) {
        const int w = adj[v][f.child++];
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        if (low[v] == index[v]) {
          const int id = static_cast<int>(res.members.size());
          res.members.emplace_back();
          int w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            res.comp[w] = id;
            res.members[id].push_back(w);
          } while (w != v);
        }
        call.pop_back();
        if (!call.empty()) {
          const int parent = call.back().v;
          low[parent] = std::min(low[parent], low[v]);
        }
      }
    }
  }
  return res;
}

}  // namespace sis::detail
