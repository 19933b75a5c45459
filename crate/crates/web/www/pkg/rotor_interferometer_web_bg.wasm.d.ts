/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_history_free: (a: number, b: number) => void;
export const __wbg_resonance_free: (a: number, b: number) => void;
export const eps_resonance: (a: number, b: number, c: number) => [number, number, number];
export const finite_resonance: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const history_cols: (a: number) => number;
export const history_data: (a: number) => [number, number];
export const history_q_min: (a: number) => number;
export const history_rows: (a: number) => number;
export const history_spreads: (a: number) => [number, number];
export const momentum_history: (a: number, b: number, c: number) => [number, number, number];
export const resonance_center_ns: (a: number) => number;
export const resonance_control_ns: (a: number) => [number, number];
export const resonance_fwhm_ns: (a: number) => number;
export const resonance_output: (a: number) => [number, number];
export const resonance_peak: (a: number) => number;
export const resonance_reference: (a: number) => [number, number];
export const talbot_time_us: () => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
