// Thin client for the dishrank ranking service.

export interface RankEntry {
  dish: string;
  score: number;
  rank: number;
}

export interface ModelInfo {
  format_version: number;
  vocab_size: number;
  embed_dim: number;
  keys: string[];
}

export interface RankResponse {
  key: string;
  results: RankEntry[];
  model: ModelInfo;
}

export class ApiError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
  }
}

async function errorMessage(res: Response): Promise<string> {
  try {
    const body = await res.json();
    if (body && typeof body.error === "string") return body.error;
  } catch {
    // non-JSON error body; fall through
  }
  return `request failed with status ${res.status}`;
}

export async function fetchKeys(baseUrl: string): Promise<string[]> {
  const res = await fetch(`${baseUrl}/api/keys`);
  if (!res.ok) throw new ApiError(await errorMessage(res), res.status);
  const body = await res.json();
  if (!Array.isArray(body.keys) || body.keys.length === 0) {
    throw new ApiError("service returned no search keys");
  }
  return body.keys;
}

export async function rankMenu(baseUrl: string, menuText: string, key: string): Promise<RankResponse> {
  const res = await fetch(`${baseUrl}/api/rank`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ menu_text: menuText, key }),
  });
  if (!res.ok) throw new ApiError(await errorMessage(res), res.status);
  return (await res.json()) as RankResponse;
}
