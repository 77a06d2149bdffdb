package shop.model;

public class Customer {
    private Address address;

    public Address getAddress() {
        return address;
    }
}
