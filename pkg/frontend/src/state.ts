/** Session token and fetch-snapshot bookkeeping.
 *
 * The UI holds no authoritative data: snapshots exist so views can say when
 * their numbers were fetched, never to answer questions the service should.
 */

export interface StringStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

const TOKEN_KEY = "modelvault.token";

export class Session {
  constructor(private readonly store: StringStore) {}

  get token(): string | null {
    return this.store.getItem(TOKEN_KEY);
  }

  signIn(token: string): void {
    this.store.setItem(TOKEN_KEY, token);
  }

  signOut(): void {
    this.store.removeItem(TOKEN_KEY);
  }
}

export interface Snapshot<T> {
  data: T;
  fetchedAt: number;
}

export class SnapshotCache {
  private readonly snapshots = new Map<string, Snapshot<unknown>>();

  constructor(private readonly clock: () => number = Date.now) {}

  put<T>(key: string, data: T): Snapshot<T> {
    const snapshot = { data, fetchedAt: this.clock() };
    this.snapshots.set(key, snapshot);
    return snapshot;
  }

  get<T>(key: string): Snapshot<T> | null {
    return (this.snapshots.get(key) as Snapshot<T> | undefined) ?? null;
  }

  ageSeconds(key: string): number | null {
    const snapshot = this.snapshots.get(key);
    if (!snapshot) return null;
    return Math.max(0, Math.round((this.clock() - snapshot.fetchedAt) / 1000));
  }
}
