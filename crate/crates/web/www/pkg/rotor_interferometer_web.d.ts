/* tslint:disable */
/* eslint-disable */

/**
 * Populations after each kick, row-major with `cols` sites per row.
 */
export class History {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly cols: number;
    readonly data: Float64Array;
    readonly q_min: number;
    readonly rows: number;
    /**
     * RMS momentum after each kick, ħκ.
     */
    readonly spreads: Float64Array;
}

/**
 * A sampled resonance with an optional reference curve; control in ns.
 */
export class Resonance {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly center_ns: number;
    readonly control_ns: Float64Array;
    /**
     * NaN when the width could not be measured.
     */
    readonly fwhm_ns: number;
    readonly output: Float64Array;
    readonly peak: number;
    /**
     * Empty when there is no reference curve.
     */
    readonly reference: Float64Array;
}

/**
 * Exact ladder output against ε next to the large-N line shape.
 */
export function eps_resonance(pulses: number, phi_d: number, points: number): Resonance;

/**
 * Finite-pulse output against ε around the l-th Talbot multiple.
 */
export function finite_resonance(pulses: number, gamma: number, tau_us: number, multiple: number, points: number): Resonance;

export function momentum_history(pulses: number, phi_d: number, eps_ns: number): History;

export function talbot_time_us(): number;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_history_free: (a: number, b: number) => void;
    readonly __wbg_resonance_free: (a: number, b: number) => void;
    readonly eps_resonance: (a: number, b: number, c: number) => [number, number, number];
    readonly finite_resonance: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly history_cols: (a: number) => number;
    readonly history_data: (a: number) => [number, number];
    readonly history_q_min: (a: number) => number;
    readonly history_rows: (a: number) => number;
    readonly history_spreads: (a: number) => [number, number];
    readonly momentum_history: (a: number, b: number, c: number) => [number, number, number];
    readonly resonance_center_ns: (a: number) => number;
    readonly resonance_control_ns: (a: number) => [number, number];
    readonly resonance_fwhm_ns: (a: number) => number;
    readonly resonance_output: (a: number) => [number, number];
    readonly resonance_peak: (a: number) => number;
    readonly resonance_reference: (a: number) => [number, number];
    readonly talbot_time_us: () => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
