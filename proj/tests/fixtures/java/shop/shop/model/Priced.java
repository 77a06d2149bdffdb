package shop.model;

public interface Priced {
    int cost();
}
