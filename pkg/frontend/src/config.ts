/** Runtime configuration injected by the host page (config.js). */

export interface ConsoleConfig {
  baseUrl: string;
  pollMs: number;
}

const DEFAULTS: ConsoleConfig = { baseUrl: "", pollMs: 2000 };

export function readConfig(source: unknown): ConsoleConfig {
  if (typeof source !== "object" || source === null) {
    return { ...DEFAULTS };
  }
  const raw = source as Partial<ConsoleConfig>;
  return {
    baseUrl: typeof raw.baseUrl === "string" ? raw.baseUrl.replace(/\/$/, "") : DEFAULTS.baseUrl,
    pollMs: typeof raw.pollMs === "number" && raw.pollMs > 0 ? raw.pollMs : DEFAULTS.pollMs,
  };
}
