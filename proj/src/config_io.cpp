#include "mcsim/config_io.hpp"

#include <sstream>

#include "mcsim/text.hpp"

namespace mcsim {

namespace {

void save_params(std::ostringstream& out, const AnalogParams& p,
                 const char* indent) {
  const auto field = [&](const char* name, double v) {
    out << indent << name << " " << format_double(v) << "\n";
  };
  field("v_leak", p.v_leak);
  field("g_leak", p.g_leak);
  field("v_alt", p.v_alt);
  field("g_alt", p.g_alt);
  field("v_th", p.v_th);
  field("t_pulse", p.t_pulse);
  field("c_mem", p.c_mem);
  field("e_rev_a", p.e_rev_a);
  field("e_rev_b", p.e_rev_b);
  field("tau_syn_a", p.tau_syn_a);
  field("tau_syn_b", p.tau_syn_b);
  field("g_syn_scale_a", p.g_syn_scale_a);
  field("g_syn_scale_b", p.g_syn_scale_b);
  field("i_unit", p.i_unit);
  field("v_exp_th", p.v_exp_th);
  field("delta_t", p.delta_t);
  field("g_ic", p.g_ic);
}

bool parse_param_field(TokenStream& ts, const std::string& key,
                       AnalogParams& p) {
  double* slot = nullptr;
  if (key == "v_leak") slot = &p.v_leak;
  else if (key == "g_leak") slot = &p.g_leak;
  else if (key == "v_alt") slot = &p.v_alt;
  else if (key == "g_alt") slot = &p.g_alt;
  else if (key == "v_th") slot = &p.v_th;
  else if (key == "t_pulse") slot = &p.t_pulse;
  else if (key == "c_mem") slot = &p.c_mem;
  else if (key == "e_rev_a") slot = &p.e_rev_a;
  else if (key == "e_rev_b") slot = &p.e_rev_b;
  else if (key == "tau_syn_a") slot = &p.tau_syn_a;
  else if (key == "tau_syn_b") slot = &p.tau_syn_b;
  else if (key == "g_syn_scale_a") slot = &p.g_syn_scale_a;
  else if (key == "g_syn_scale_b") slot = &p.g_syn_scale_b;
  else if (key == "i_unit") slot = &p.i_unit;
  else if (key == "v_exp_th") slot = &p.v_exp_th;
  else if (key == "delta_t") slot = &p.delta_t;
  else if (key == "g_ic") slot = &p.g_ic;
  if (!slot) return false;
  *slot = ts.next_double();
  return true;
}

void parse_params_block(TokenStream& ts, AnalogParams& p) {
  ts.expect("{");
  while (ts.peek().text != "}") {
    const std::string key = ts.next_word();
    if (!parse_param_field(ts, key, p))
      ts.fail("unknown analog parameter '" + key + "'");
  }
  ts.expect("}");
}

void parse_compartment(TokenStream& ts, ChipConfig& cfg) {
  Block b;
  if (!parse_block(ts.peek().text, b)) ts.fail("expected a block name");
  ts.next();
  const long long col = ts.next_int();
  if (col < 0 || col >= cfg.n_columns)
    ts.fail("column out of range (n_columns = " +
            std::to_string(cfg.n_columns) + ")");
  CompartmentConfig& c = cfg.comp(b, static_cast<int>(col));
  ts.expect("{");
  while (ts.peek().text != "}") {
    const std::string key = ts.next_word();
    if (key == "mode") {
      if (!parse_mode(ts.peek().text, c.mode)) ts.fail("unknown mode");
      ts.next();
    } else if (key == "exp_term") {
      c.exp_term = ts.next_bool();
    } else if (key == "merge_right") {
      c.merge_right = ts.next_bool();
    } else if (key == "merge_vertical") {
      c.merge_vertical = ts.next_bool();
    } else if (key == "soma_connect") {
      c.soma_connect = ts.next_bool();
    } else if (key == "soma_bypass") {
      c.soma_bypass = ts.next_bool();
    } else if (key == "current_input") {
      c.current_input = ts.next_bool();
    } else if (key == "params") {
      parse_params_block(ts, c.params);
    } else {
      ts.fail("unknown compartment field '" + key + "'");
    }
  }
  ts.expect("}");
}

void parse_row(TokenStream& ts, ChipConfig& cfg) {
  SynapseRow row;
  if (!parse_block(ts.peek().text, row.block)) ts.fail("expected a block name");
  ts.next();
  row.index = static_cast<int>(ts.next_int());
  ts.expect("{");
  while (ts.peek().text != "}") {
    const std::string key = ts.next_word();
    if (key == "target_line") {
      if (!parse_line(ts.peek().text, row.target_line))
        ts.fail("expected 'a' or 'b'");
      ts.next();
    } else if (key == "cells") {
      // n_columns entries of the form address:weight
      for (int col = 0; col < cfg.n_columns; ++col) {
        const Token t = ts.next();
        const auto sep = t.text.find(':');
        if (sep == std::string::npos)
          ts.fail("expected address:weight, got '" + t.text + "'");
        SynapseCell cell;
        try {
          const int addr = std::stoi(t.text.substr(0, sep));
          const int w = std::stoi(t.text.substr(sep + 1));
          if (addr < 0 || addr > 255 || w < 0 || w > 255) throw std::out_of_range("");
          cell.address = static_cast<std::uint8_t>(addr);
          cell.weight = static_cast<std::uint8_t>(w);
        } catch (const std::exception&) {
          ts.fail("malformed synapse cell '" + t.text + "'");
        }
        row.cells.push_back(cell);
      }
    } else {
      ts.fail("unknown row field '" + key + "'");
    }
  }
  ts.expect("}");
  if (row.cells.empty()) row.cells.assign(cfg.n_columns, SynapseCell{});
  cfg.rows.push_back(std::move(row));
}

void parse_switches(TokenStream& ts, ChipConfig& cfg) {
  Block b;
  if (!parse_block(ts.peek().text, b)) ts.fail("expected a block name");
  ts.next();
  auto& flags = b == Block::Upper ? cfg.soma_switch_upper
                                  : cfg.soma_switch_lower;
  flags.clear();
  for (int i = 0; i < cfg.n_segment_switches(); ++i) {
    const Token t = ts.next();
    if (t.text == "closed") flags.push_back(1);
    else if (t.text == "open") flags.push_back(0);
    else ts.fail("expected 'open' or 'closed', got '" + t.text + "'");
  }
}

}  // namespace

std::string save_chip_text(const ChipConfig& cfg) {
  std::ostringstream out;
  out << "chip {\n";
  out << "  n_columns " << cfg.n_columns << "\n";
  out << "  soma_segment_period " << kSomaSegmentPeriod << "\n";
  for (Block b : {Block::Upper, Block::Lower}) {
    if (cfg.n_segment_switches() > 0) {
      out << "  soma_switches " << to_string(b);
      for (const auto flag : cfg.soma_switches(b))
        out << " " << (flag ? "closed" : "open");
      out << "\n";
    }
  }
  for (Block b : {Block::Upper, Block::Lower}) {
    for (int col = 0; col < cfg.n_columns; ++col) {
      const auto& c = cfg.comp(b, col);
      out << "  compartment " << to_string(b) << " " << col << " {\n";
      out << "    mode " << to_string(c.mode) << "\n";
      out << "    exp_term " << (c.exp_term ? "true" : "false") << "\n";
      out << "    merge_right " << (c.merge_right ? "true" : "false") << "\n";
      out << "    merge_vertical " << (c.merge_vertical ? "true" : "false")
          << "\n";
      out << "    soma_connect " << (c.soma_connect ? "true" : "false") << "\n";
      out << "    soma_bypass " << (c.soma_bypass ? "true" : "false") << "\n";
      out << "    current_input " << (c.current_input ? "true" : "false")
          << "\n";
      out << "    params {\n";
      save_params(out, c.params, "      ");
      out << "    }\n";
      out << "  }\n";
    }
  }
  for (const auto& row : cfg.rows) {
    out << "  row " << to_string(row.block) << " " << row.index << " {\n";
    out << "    target_line " << to_string(row.target_line) << "\n";
    out << "    cells";
    for (const auto& cell : row.cells)
      out << " " << static_cast<int>(cell.address) << ":"
          << static_cast<int>(cell.weight);
    out << "\n";
    out << "  }\n";
  }
  out << "}\n";
  return out.str();
}

ChipConfig parse_chip_block(TokenStream& ts) {
  ChipConfig cfg;
  ts.expect("chip");
  ts.expect("{");
  ts.expect("n_columns");
  const long long n = ts.next_int();
  if (n < 1 || n > 4096) ts.fail("n_columns out of range");
  cfg.n_columns = static_cast<int>(n);
  cfg.compartments.assign(2 * cfg.n_columns, CompartmentConfig{});
  cfg.soma_switch_upper.assign(cfg.n_segment_switches(), 0);
  cfg.soma_switch_lower.assign(cfg.n_segment_switches(), 0);
  while (ts.peek().text != "}") {
    const std::string key = ts.next_word();
    if (key == "soma_segment_period") {
      if (ts.next_int() != kSomaSegmentPeriod)
        ts.fail("segment period is fixed at " +
                std::to_string(kSomaSegmentPeriod));
    } else if (key == "compartment") {
      parse_compartment(ts, cfg);
    } else if (key == "row") {
      parse_row(ts, cfg);
    } else if (key == "soma_switches") {
      parse_switches(ts, cfg);
    } else {
      ts.fail("unknown chip field '" + key + "'");
    }
  }
  ts.expect("}");
  return cfg;
}

ChipConfig load_chip_text(const std::string& content,
                          const std::string& filename) {
  TokenStream ts(filename, tokenize(content));
  ChipConfig cfg = parse_chip_block(ts);
  if (!ts.done()) ts.fail("trailing content after chip block");
  return cfg;
}

void save_chip_file(const ChipConfig& cfg, const std::string& path) {
  write_file(path, save_chip_text(cfg));
}

ChipConfig load_chip_file(const std::string& path) {
  return load_chip_text(read_file(path), path);
}

}  // namespace mcsim
