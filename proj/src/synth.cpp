#include "docstruct/synth.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <tuple>

#include "docstruct/geometry.hpp"

namespace docstruct {

namespace {

constexpr double kPageW = 1200.0;
constexpr double kPageH = 1600.0;
constexpr double kMarginX = 100.0;
constexpr double kTop = 90.0;
constexpr double kBottom = 1510.0;
constexpr double kFlowGap = 40.0;

constexpr double kLeftX0 = 100.0, kLeftX1 = 580.0;
constexpr double kRightX0 = 620.0, kRightX1 = 1100.0;

// Raw mt19937_64 with manual scaling; std distributions are not portable
// across library implementations and these pages must be reproducible.
struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double unit() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
  double range(double lo, double hi) { return lo + unit() * (hi - lo); }
  int pick(int lo, int hi) {
    return lo + static_cast<int>(gen() % static_cast<std::uint64_t>(hi - lo + 1));
  }
};

struct BlockDims {
  int lines = 3;
  int line_height = 20;
  double height() const { return static_cast<double>(lines * line_height); }
};

struct FigureDims {
  int graphic_height = 160;
  double height() const { return graphic_height + 8.0 + 16.0; }
};

struct TableDims {
  int rows = 2, cols = 2;
  int row_height = 26, col_width = 120;
  double height() const { return 22.0 + rows * row_height; }
  double width() const { return static_cast<double>(cols * col_width); }
};

BlockDims draw_block(Rng& rng) {
  BlockDims d;
  d.lines = rng.pick(2, 5);
  d.line_height = 18 + 2 * rng.pick(0, 2);
  return d;
}

FigureDims draw_figure(Rng& rng) {
  FigureDims d;
  d.graphic_height = rng.pick(100, 200);
  return d;
}

TableDims draw_table(Rng& rng, const FloatSpec& spec, double avail_width) {
  TableDims d;
  d.rows = std::max(2, spec.rows);
  d.cols = std::max(2, spec.cols);
  d.row_height = 24 + 2 * rng.pick(0, 2);
  d.col_width = std::min(120, static_cast<int>(avail_width) / d.cols);
  return d;
}

bool position_less(const Entity& a, const Entity& b) {
  return std::tie(a.bbox.y0, a.bbox.x0, a.id) < std::tie(b.bbox.y0, b.bbox.x0, b.id);
}

struct Builder {
  GeneratedPage out;
  std::vector<Relation> parent_edges;
  std::vector<std::vector<std::string>> chains;
  std::vector<std::string> root_chain;
  int next_block = 0, next_figure = 0, next_table = 0;

  Entity& add_entity(std::string id, Category cat, BBox box) {
    Entity e;
    e.id = std::move(id);
    e.category = cat;
    e.bbox = box;
    out.ground_truth.entities.push_back(std::move(e));
    return out.ground_truth.entities.back();
  }

  void add_edge(const std::string& parent, const std::string& child) {
    parent_edges.push_back({parent, child, RelationType::parent_of});
  }

  void record(TokenKind kind, BBox box, std::vector<std::string> stack,
              std::optional<std::string> env = std::nullopt,
              std::optional<std::string> cmd = std::nullopt) {
    RenderRecord r;
    r.bbox = box;
    r.page = 0;
    r.kind = kind;
    r.env_name = std::move(env);
    r.command_name = std::move(cmd);
    r.nesting_stack = std::move(stack);
    out.records.push_back(std::move(r));
  }

  void place_block(double x0, double x1, double y, const BlockDims& d) {
    const std::string id = "b" + std::to_string(next_block++);
    const BBox box{x0, y, x1, y + d.height()};
    add_entity(id, Category::content_block, box);
    root_chain.push_back(id);
    const int full = static_cast<int>(x1 - x0);
    const int narrow = full * 9 / 10;
    for (int i = 0; i < d.lines; ++i) {
      const double ly = y + static_cast<double>(i * d.line_height);
      const double lw = i == 0 ? full : narrow;
      record(TokenKind::text_token, {x0, ly, x0 + lw, ly + d.line_height}, {});
    }
  }

  void place_figure(double x0, double x1, double y, const FigureDims& d) {
    const std::string id = "f" + std::to_string(next_figure++);
    const BBox graphic{x0, y, x1, y + d.graphic_height};
    const BBox caption{x0 + 30, graphic.y1 + 8, x1 - 30, graphic.y1 + 24};
    const BBox fig{x0, y, x1, caption.y1};
    add_entity(id, Category::figure, fig);
    add_entity(id + "_g", Category::figure_graphic, graphic);
    add_entity(id + "_cap", Category::figure_caption, caption);
    add_edge(id, id + "_g");
    add_edge(id, id + "_cap");
    chains.push_back({id + "_g", id + "_cap"});
    root_chain.push_back(id);
    record(TokenKind::environment_begin, fig, {}, "figure");
    record(TokenKind::command, graphic, {"figure"}, std::nullopt, "includegraphics");
    record(TokenKind::command, caption, {"figure"}, std::nullopt, "caption");
    record(TokenKind::environment_end, fig, {"figure"}, "figure");
  }

  void place_table(double x0, double y, const TableDims& d) {
    const std::string id = "t" + std::to_string(next_table++);
    const double w = d.width();
    const BBox caption{x0 + 20, y, x0 + w - 20, y + 16};
    const double ty0 = y + 22;
    const BBox tabular{x0, ty0, x0 + w, ty0 + d.rows * d.row_height};
    const BBox table{x0, y, x0 + w, tabular.y1};

    add_entity(id, Category::table, table);
    add_entity(id + "_cap", Category::table_caption, caption);
    add_entity(id + "_tab", Category::tabular, tabular);
    add_edge(id, id + "_cap");
    add_edge(id, id + "_tab");
    chains.push_back({id + "_cap", id + "_tab"});

    std::vector<Entity> grid;
    for (int r = 0; r < d.rows; ++r) {
      Entity e;
      e.id = id + "_row" + std::to_string(r);
      e.category = Category::table_row;
      const double ry = ty0 + static_cast<double>(r * d.row_height);
      e.bbox = {x0, ry, x0 + w, ry + d.row_height};
      grid.push_back(std::move(e));
    }
    for (int c = 0; c < d.cols; ++c) {
      Entity e;
      e.id = id + "_col" + std::to_string(c);
      e.category = Category::table_column;
      const double cx = x0 + static_cast<double>(c * d.col_width);
      e.bbox = {cx, ty0, cx + d.col_width, tabular.y1};
      grid.push_back(std::move(e));
    }
    for (int r = 0; r < d.rows; ++r) {
      for (int c = 0; c < d.cols; ++c) {
        Entity e;
        e.id = id + "_cell" + std::to_string(r) + "_" + std::to_string(c);
        e.category = Category::table_cell;
        const double cx = x0 + static_cast<double>(c * d.col_width);
        const double ry = ty0 + static_cast<double>(r * d.row_height);
        e.bbox = {cx, ry, cx + d.col_width, ry + d.row_height};
        e.cell_range = CellRange{r, r, c, c};
        grid.push_back(std::move(e));
      }
    }
    std::vector<std::string> grid_chain;
    {
      std::vector<const Entity*> sorted;
      for (const Entity& e : grid) sorted.push_back(&e);
      std::sort(sorted.begin(), sorted.end(),
                [](const Entity* a, const Entity* b) { return position_less(*a, *b); });
      for (const Entity* e : sorted) grid_chain.push_back(e->id);
    }
    for (Entity& e : grid) {
      add_edge(id + "_tab", e.id);
      out.ground_truth.entities.push_back(std::move(e));
    }
    chains.push_back(std::move(grid_chain));
    root_chain.push_back(id);

    record(TokenKind::environment_begin, table, {}, "table");
    record(TokenKind::command, caption, {"table"}, std::nullopt, "caption");
    record(TokenKind::environment_begin, tabular, {"table"}, "tabular");
    for (int r = 0; r < d.rows; ++r) {
      for (int c = 0; c < d.cols; ++c) {
        const double cx = x0 + static_cast<double>(c * d.col_width);
        const double ry = ty0 + static_cast<double>(r * d.row_height);
        record(TokenKind::text_token,
               {cx, ry, cx + d.col_width, ry + d.row_height}, {"table", "tabular"});
      }
    }
    record(TokenKind::environment_end, tabular, {"table", "tabular"}, "tabular");
    record(TokenKind::environment_end, table, {"table"}, "table");
  }
};

}  // namespace

GeneratedPage generate_page(const PageSpec& spec) {
  Rng rng(spec.seed);
  Builder b;
  b.out.ground_truth.page_width = kPageW;
  b.out.ground_truth.page_height = kPageH;

  const int columns = spec.columns >= 2 ? 2 : 1;
  const int nblocks = std::max(0, spec.blocks_per_column);

  if (columns == 1) {
    // One flow: floats spread evenly between the blocks.
    const int nf = static_cast<int>(spec.floats.size());
    std::vector<int> items;  // -1 for a block, else float index
    {
      int placed_blocks = 0;
      for (int k = 0; k < nf; ++k) {
        const int before = static_cast<int>(
            static_cast<long long>(k + 1) * nblocks / (nf + 1));
        while (placed_blocks < before) {
          items.push_back(-1);
          ++placed_blocks;
        }
        items.push_back(k);
      }
      while (placed_blocks < nblocks) {
        items.push_back(-1);
        ++placed_blocks;
      }
    }
    double y = kTop;
    for (int item : items) {
      if (item < 0) {
        const BlockDims d = draw_block(rng);
        if (y + d.height() > kBottom) continue;
        b.place_block(kMarginX, kPageW - kMarginX, y, d);
        y += d.height() + kFlowGap;
        continue;
      }
      const FloatSpec& fs = spec.floats[item];
      if (fs.kind == Category::table) {
        const TableDims d = draw_table(rng, fs, kLeftX1 - kLeftX0);
        if (y + d.height() > kBottom) continue;
        b.place_table(kLeftX0, y, d);
        y += d.height() + kFlowGap;
      } else {
        const FigureDims d = draw_figure(rng);
        if (y + d.height() > kBottom) continue;
        const double x0 = fs.full_width ? kMarginX : kLeftX0;
        const double x1 = fs.full_width ? kPageW - kMarginX : kLeftX1;
        b.place_figure(x0, x1, y, d);
        y += d.height() + kFlowGap;
      }
    }
  } else {
    // Full-width figures split the two-column text into stripes.
    std::vector<int> full_width, in_column;
    for (int i = 0; i < static_cast<int>(spec.floats.size()); ++i) {
      const FloatSpec& fs = spec.floats[i];
      if (fs.kind == Category::figure && fs.full_width)
        full_width.push_back(i);
      else
        in_column.push_back(i);
    }
    const int stripes = static_cast<int>(full_width.size()) + 1;

    auto blocks_in_stripe = [&](int s) {
      return nblocks / stripes + (s < nblocks % stripes ? 1 : 0);
    };
    // in-column float j: column j % 2, stripe (j / 2) % stripes
    auto floats_in = [&](int s, int side) {
      std::vector<int> result;
      for (int j = 0; j < static_cast<int>(in_column.size()); ++j)
        if (j % 2 == side && (j / 2) % stripes == s) result.push_back(in_column[j]);
      return result;
    };

    double y = kTop;
    bool aborted = false;
    for (int s = 0; s < stripes && !aborted; ++s) {
      double bottom = y;
      for (int side = 0; side < 2; ++side) {
        const double cx0 = side == 0 ? kLeftX0 : kRightX0;
        const double cx1 = side == 0 ? kLeftX1 : kRightX1;
        double cursor = y;
        for (int i = 0; i < blocks_in_stripe(s); ++i) {
          const BlockDims d = draw_block(rng);
          if (cursor + d.height() > kBottom) continue;
          b.place_block(cx0, cx1, cursor, d);
          cursor += d.height() + kFlowGap;
        }
        for (int fi : floats_in(s, side)) {
          const FloatSpec& fs = spec.floats[fi];
          if (fs.kind == Category::table) {
            const TableDims d = draw_table(rng, fs, cx1 - cx0);
            if (cursor + d.height() > kBottom) continue;
            b.place_table(cx0, cursor, d);
            cursor += d.height() + kFlowGap;
          } else {
            const FigureDims d = draw_figure(rng);
            if (cursor + d.height() > kBottom) continue;
            b.place_figure(cx0, cx1, cursor, d);
            cursor += d.height() + kFlowGap;
          }
        }
        bottom = std::max(bottom, cursor);
      }
      y = bottom;
      if (s + 1 < stripes) {
        const FigureDims d = draw_figure(rng);
        if (y + d.height() > kBottom) {
          // A missing stripe boundary would fold the remaining text into
          // this stripe and change the reading order, so stop instead.
          aborted = true;
          break;
        }
        b.place_figure(kMarginX, kPageW - kMarginX, y, d);
        y += d.height() + kFlowGap;
      }
    }
  }

  if (spec.include_meta) {
    b.add_entity("meta_header", Category::header, {100, 30, 1100, 55});
    b.add_entity("meta_footer", Category::footer, {100, 1540, 1100, 1565});
    b.add_entity("meta_page_number", Category::page_number, {585, 1570, 615, 1585});
  }

  DocStructure& s = b.out.ground_truth;
  s.relations = std::move(b.parent_edges);
  auto emit_chain = [&](const std::vector<std::string>& chain) {
    for (size_t i = 0; i + 1 < chain.size(); ++i)
      s.relations.push_back({chain[i], chain[i + 1], RelationType::followed_by});
  };
  emit_chain(b.root_chain);
  for (const auto& chain : b.chains) emit_chain(chain);
  return b.out;
}

PageSpec random_page_spec(std::uint64_t seed) {
  Rng rng(seed);
  PageSpec spec;
  spec.seed = seed;
  spec.columns = rng.pick(1, 2);
  spec.blocks_per_column = rng.pick(2, 3);
  const int nfloats = rng.pick(1, 3);
  for (int i = 0; i < nfloats; ++i) {
    FloatSpec f;
    if (rng.pick(0, 1) == 0) {
      f.kind = Category::figure;
      f.full_width = rng.pick(0, 1) == 0;
    } else {
      f.kind = Category::table;
      f.rows = rng.pick(2, 4);
      f.cols = rng.pick(2, 4);
    }
    spec.floats.push_back(f);
  }
  spec.include_meta = rng.pick(0, 1) == 1;
  return spec;
}

std::vector<Entity> perturb(const DocStructure& ground_truth, const NoiseSpec& noise) {
  Rng rng(noise.seed);
  std::vector<Entity> out;
  out.reserve(ground_truth.entities.size());

  const auto categories = all_categories();
  for (const Entity& src : ground_truth.entities) {
    if (rng.unit() < noise.drop_rate) continue;
    Entity e = src;
    e.cell_range.reset();

    e.bbox.x0 += rng.range(-noise.jitter, noise.jitter);
    e.bbox.y0 += rng.range(-noise.jitter, noise.jitter);
    e.bbox.x1 += rng.range(-noise.jitter, noise.jitter);
    e.bbox.y1 += rng.range(-noise.jitter, noise.jitter);
    if (e.bbox.x1 - e.bbox.x0 < 1.0) {
      const double mid = (e.bbox.x0 + e.bbox.x1) / 2.0;
      e.bbox.x0 = mid - 0.5;
      e.bbox.x1 = mid + 0.5;
    }
    if (e.bbox.y1 - e.bbox.y0 < 1.0) {
      const double mid = (e.bbox.y0 + e.bbox.y1) / 2.0;
      e.bbox.y0 = mid - 0.5;
      e.bbox.y1 = mid + 0.5;
    }

    if (rng.unit() < noise.relabel_rate) {
      const int roll = rng.pick(0, static_cast<int>(categories.size()) - 2);
      const int current = static_cast<int>(e.category);
      e.category = categories[roll >= current ? roll + 1 : roll];
    }

    const double c =
        noise.confidence_base + rng.range(-noise.confidence_jitter, noise.confidence_jitter);
    e.confidence = std::clamp(c, 0.0, 1.0);
    out.push_back(std::move(e));
  }

  for (size_t i = out.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.gen() % i);
    std::swap(out[i - 1], out[j]);
  }
  return out;
}

}  // namespace docstruct
