#pragma once

#include "hfeq/scenarios/catalog.hpp"

namespace hfeq::scenarios::runners {

using Runner = void(const ScenarioConfig&, OutputSink&, Report&);

Runner fig2, fig3, fig4, fig5, appendix_a, appendix_b, appendix_c, appendix_f, appendix_g, appendix_h, table1;

}  // namespace hfeq::scenarios::runners
