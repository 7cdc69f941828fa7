"""Step-by-step interpreters of the inference and training access-count
procedures, written as plain scalar loops that follow the pseudocode line by
line.  The library's vectorized engine must agree with these exactly.

Interpretation choices shared with the library (each one is a documented
decision, not an optimization):
  * the upper-buffer threshold UB is the GLB capacity unless given;
  * overflow surcharges (X - GLB)/mbpa never go below zero;
  * training fast path: layer 1 reads I+W, later layers read W only;
  * training overflow path also writes spilled ofmaps as inference does.
"""


def inference_oracle(I, O, W, glb, mbpa_dram, mbpa_glb, ub=None):
    UB = glb if ub is None else ub
    n = len(I)
    rd_dram, wr_dram, rd_glb, wr_glb = [], [], [], []
    for i in range(n):
        RD_GLB = I[i] / mbpa_glb
        if i == 0:
            WR_GLB = (I[i] + O[i]) / mbpa_glb
            if I[i] + W[i] <= glb:
                RD_DRAM = (I[i] + W[i]) / mbpa_dram
            else:
                RD_DRAM = (I[i] + W[i]) / mbpa_dram + (I[i] + W[i] - glb) / mbpa_dram
        else:
            WR_GLB = O[i] / mbpa_glb
            if O[i - 1] <= UB:
                if W[i] <= glb:
                    RD_DRAM = W[i] / mbpa_dram
                else:
                    RD_DRAM = W[i] / mbpa_dram + (W[i] - glb) / mbpa_dram
            else:
                RD_DRAM = (I[i] + W[i]) / mbpa_dram + max((I[i] + W[i]) - glb, 0.0) / mbpa_dram
        if i == n - 1:
            WR_DRAM = O[i] / mbpa_dram
        else:
            if O[i] > glb:
                WR_DRAM = max(O[i] - UB, 0.0) / mbpa_dram
            else:
                WR_DRAM = 0.0
        rd_dram.append(RD_DRAM)
        wr_dram.append(WR_DRAM)
        rd_glb.append(RD_GLB)
        wr_glb.append(WR_GLB)
    return rd_dram, wr_dram, rd_glb, wr_glb


def training_oracle(I, O, W, glb, mbpa_dram, mbpa_glb, ub=None):
    UB = glb if ub is None else ub
    GI, GO, GW = I, O, W
    n = len(I)
    cum_layer = 0.0
    rd_dram, wr_dram, rd_glb, wr_glb = [], [], [], []
    for i in range(n):
        layer_f = I[i] + O[i] + W[i]
        layer_b = GI[i] + GO[i] + GW[i]
        layer = layer_f + layer_b
        cum_layer = cum_layer + layer
        RD_GLB = (3 * I[i] + O[i] + 5 * W[i]) / mbpa_glb
        WR_GLB = (2 * I[i] + 2 * O[i] + 3 * W[i]) / mbpa_glb
        if cum_layer <= glb:
            if i == 0:
                rd_f = (I[i] + W[i]) / mbpa_dram
            else:
                rd_f = W[i] / mbpa_dram
            if i == n - 1:
                wr_f = O[i] / mbpa_dram
            else:
                wr_f = 0.0
            rd_b = 0.0
        else:
            if i != 0 and O[i - 1] <= glb:
                rd_f = W[i] / mbpa_dram
            else:
                if I[i] + W[i] <= glb:
                    rd_f = (I[i] + W[i]) / mbpa_dram
                else:
                    rd_f = (I[i] + W[i]) / mbpa_dram + (I[i] + W[i] - glb) / mbpa_dram
            if i == n - 1:
                wr_o = O[i] / mbpa_dram
            elif O[i] > glb:
                wr_o = max(O[i] - UB, 0.0) / mbpa_dram
            else:
                wr_o = 0.0
            if GI[i] + GO[i] + GW[i] <= glb:
                wr_f = wr_o + 0.0
                rd_b = 0.0
            else:
                wr_f = wr_o + (GI[i] + GO[i] + GW[i]) / mbpa_dram
                rd_b = (GI[i] + GO[i] + GW[i]) / mbpa_dram
        wr_b = W[i] / mbpa_dram
        rd_dram.append(rd_f + rd_b)
        wr_dram.append(wr_f + wr_b)
        rd_glb.append(RD_GLB)
        wr_glb.append(WR_GLB)
    return rd_dram, wr_dram, rd_glb, wr_glb
