#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#ifndef SCLFORGE_SOURCE_DIR
#define SCLFORGE_SOURCE_DIR "."
#endif

namespace sclforge::testing {

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string fixture(const std::string& name) { return std::string(SCLFORGE_SOURCE_DIR) + "/fixtures/" + name; }

std::vector<int> decode(const PowerWord& w) {
  std::vector<int> out;
  for (const auto& r : w.runs()) {
    const int letter = static_cast<int>(r.gen) + 1;
    const long n = std::abs(r.exp.get_si());
    for (long i = 0; i < n; ++i) out.push_back(r.exp > 0 ? letter : -letter);
  }
  return out;
}

namespace {

struct SuffixAutomaton {
  struct State {
    std::size_t len = 0;
    long link = -1;
    std::map<int, std::size_t> next;
  };
  std::vector<State> st{State{}};
  std::size_t last = 0;

  void extend(int c) {
    const std::size_t cur = st.size();
    st.push_back({st[last].len + 1, -1, {}});
    long p = static_cast<long>(last);
    while (p != -1 && !st[p].next.count(c)) {
      st[p].next[c] = cur;
      p = st[p].link;
    }
    if (p == -1) {
      st[cur].link = 0;
    } else {
      const std::size_t q = st[p].next[c];
      if (st[p].len + 1 == st[q].len) {
        st[cur].link = static_cast<long>(q);
      } else {
        const std::size_t clone = st.size();
        st.push_back({st[p].len + 1, st[q].link, st[q].next});
        while (p != -1 && st[p].next.count(c) && st[p].next[c] == q) {
          st[p].next[c] = clone;
          p = st[p].link;
        }
        st[q].link = st[cur].link = static_cast<long>(clone);
      }
    }
    last = cur;
  }
};

}  // namespace

std::size_t oracle_piece(const std::vector<int>& u, const std::vector<int>& v) {
  if (u.empty() || v.empty()) return 0;
  SuffixAutomaton sam;
  for (int rep = 0; rep < 2; ++rep)
    for (int c : u) sam.extend(c);
  std::size_t state = 0, len = 0, best = 0;
  for (int rep = 0; rep < 2; ++rep) {
    for (int c : v) {
      while (state != 0 && !sam.st[state].next.count(c)) {
        state = static_cast<std::size_t>(sam.st[state].link);
        len = sam.st[state].len;
      }
      if (auto it = sam.st[state].next.find(c); it != sam.st[state].next.end()) {
        state = it->second;
        ++len;
      }
      best = std::max(best, len);
    }
  }
  return std::min({best, u.size(), v.size()});
}

std::size_t oracle_self_piece(const std::vector<int>& u) {
  const std::size_t n = u.size();
  std::size_t best = 0;
  for (std::size_t s = 1; s < n; ++s) {
    // Longest cyclic run of k with u[k] == u[k + s].
    std::size_t run = 0, longest = 0;
    for (std::size_t k = 0; k < 2 * n; ++k) {
      if (u[k % n] == u[(k + s) % n]) {
        longest = std::max(longest, ++run);
      } else {
        run = 0;
      }
    }
    // Both occurrences inside one rotation: the shift and its complement.
    best = std::max(best, std::min(longest, std::max(s, n - s)));
  }
  return best;
}

namespace {

struct Model {
  std::vector<std::vector<std::size_t>> disks;
  std::vector<long> mate;

  std::size_t new_dart() {
    mate.push_back(-1);
    return mate.size() - 1;
  }
  void pair(std::size_t a, std::size_t b) {
    mate[a] = static_cast<long>(b);
    mate[b] = static_cast<long>(a);
  }
};

Model polygon_model(int genus, int boundaries, std::mt19937_64& rng) {
  Model m;
  if (genus == 0 && boundaries == 0) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
    std::vector<std::size_t> a, b;
    for (std::size_t i = 0; i < k; ++i) a.push_back(m.new_dart());
    for (std::size_t i = 0; i < k; ++i) {
      b.push_back(m.new_dart());
      m.pair(a[k - 1 - i], b.back());
    }
    m.disks = {a, b};
    return m;
  }
  if (genus == 0 && boundaries == 1) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    std::vector<std::size_t> a;
    for (std::size_t i = 0; i < k; ++i) a.push_back(m.new_dart());
    m.disks = {a};
    return m;
  }
  std::vector<std::size_t> d;
  for (int g = 0; g < genus; ++g) {
    std::size_t x[4];
    for (auto& v : x) v = m.new_dart();
    m.pair(x[0], x[2]);
    m.pair(x[1], x[3]);
    d.insert(d.end(), x, x + 4);
  }
  for (int b = 0; b < boundaries; ++b) {
    std::size_t x[3];
    for (auto& v : x) v = m.new_dart();
    m.pair(x[0], x[2]);
    d.insert(d.end(), x, x + 3);
  }
  m.disks = {d};
  return m;
}

void chord_split(Model& m, std::mt19937_64& rng) {
  const std::size_t di = std::uniform_int_distribution<std::size_t>(0, m.disks.size() - 1)(rng);
  const auto disk = m.disks[di];
  const std::size_t n = disk.size();
  std::uniform_int_distribution<std::size_t> pos(0, n - 1);
  const std::size_t i = pos(rng), j = pos(rng);
  const std::size_t x = m.new_dart(), y = m.new_dart();
  m.pair(x, y);
  std::vector<std::size_t> a, b;
  if (i == j) {
    a = {x};
    for (std::size_t k = 0; k < n; ++k) b.push_back(disk[(i + k) % n]);
    b.push_back(y);
  } else {
    for (std::size_t k = i; k != j; k = (k + 1) % n) a.push_back(disk[k]);
    a.push_back(x);
    for (std::size_t k = j; k != i; k = (k + 1) % n) b.push_back(disk[k]);
    b.push_back(y);
  }
  m.disks[di] = a;
  m.disks.push_back(b);
}

void subdivide(Model& m, std::mt19937_64& rng) {
  const std::size_t total = m.mate.size();
  const std::size_t d = std::uniform_int_distribution<std::size_t>(0, total - 1)(rng);
  auto insert_after = [&](std::size_t dart, std::size_t fresh) {
    for (auto& disk : m.disks) {
      auto it = std::find(disk.begin(), disk.end(), dart);
      if (it != disk.end()) {
        disk.insert(it + 1, fresh);
        return;
      }
    }
    throw std::logic_error("dart not in any disk");
  };
  const std::size_t d2 = m.new_dart();
  insert_after(d, d2);
  if (m.mate[d] >= 0) {
    const std::size_t e = static_cast<std::size_t>(m.mate[d]);
    const std::size_t e2 = m.new_dart();
    insert_after(e, e2);
    m.pair(d, e2);
    m.pair(d2, e);
  }
}

}  // namespace

GeneratedDiagram random_surface(std::mt19937_64& rng, int genus, int boundaries, int refinements) {
  Model m = polygon_model(genus, boundaries, rng);
  for (int r = 0; r < refinements; ++r) {
    if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) chord_split(m, rng);
    else subdivide(m, rng);
  }

  // Labels: one generator per edge.
  const std::size_t D = m.mate.size();
  std::vector<std::string> names;
  std::vector<PowerWord> label(D);
  std::vector<bool> done(D, false);
  std::uniform_int_distribution<int> exp(1, 4), coin(0, 1);
  for (std::size_t d = 0; d < D; ++d) {
    if (done[d]) continue;
    const GenId g = static_cast<GenId>(names.size());
    names.push_back("e" + std::to_string(g + 1));
    const int k = exp(rng) * (coin(rng) ? 1 : -1);
    label[d] = PowerWord::letter(g, k);
    done[d] = true;
    if (m.mate[d] >= 0) {
      label[m.mate[d]] = PowerWord::letter(g, -k);
      done[m.mate[d]] = true;
    }
  }
  Alphabet alphabet(names);

  // Random dart ids.
  std::vector<std::uint64_t> ids(D);
  for (std::size_t i = 0; i < D; ++i) ids[i] = i + 1;
  std::shuffle(ids.begin(), ids.end(), rng);

  GeneratedDiagram out{{}, Presentation::finite(alphabet, {}), 0, ""};
  for (std::size_t d = 0; d < D; ++d) {
    out.diagram.darts.push_back({ids[d], label[d]});
    if (m.mate[d] > static_cast<long>(d)) out.diagram.pairs.emplace_back(ids[d], ids[m.mate[d]]);
  }
  std::vector<CyclicWord> relators;
  for (std::size_t p = 0; p < m.disks.size(); ++p) {
    auto disk = m.disks[p];
    PowerWord boundary;
    for (std::size_t d : disk) boundary.append(label[d]);
    const int sign = coin(rng) ? 1 : -1;
    relators.push_back(cyclic_reduce(sign > 0 ? boundary : boundary.inverse()).core);
    std::rotate(disk.begin(), disk.begin() + std::uniform_int_distribution<std::size_t>(0, disk.size() - 1)(rng),
                disk.end());
    DiskSpec spec;
    spec.sign = sign;
    spec.relator = p + 1;
    for (std::size_t d : disk) spec.darts.push_back(ids[d]);
    out.diagram.disks.push_back(std::move(spec));
  }
  out.presentation = Presentation::finite(alphabet, std::move(relators));
  out.expected_chi = 2 - 2 * genus - boundaries;
  out.kind = "genus " + std::to_string(genus) + ", " + std::to_string(boundaries) + " boundary";
  return out;
}

GeneratedDiagram random_diagram(std::mt19937_64& rng) {
  static const int shapes[][2] = {{0, 0}, {1, 0}, {2, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 1}, {2, 2}};
  const auto& s = shapes[std::uniform_int_distribution<std::size_t>(0, std::size(shapes) - 1)(rng)];
  return random_surface(rng, s[0], s[1], std::uniform_int_distribution<int>(0, 12)(rng));
}

}  // namespace sclforge::testing
